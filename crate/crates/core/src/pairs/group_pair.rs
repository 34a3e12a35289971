// SPDX-License-Identifier: Apache-2.0

use super::ObservablePair;
use crate::algebra::{FiniteAbelianGroup, Semiring, SemiTensor, C64};
use crate::error::Result;
use crate::observables::ObservableStructure;

/// The strongly complementary pair classified by a finite abelian group:
/// gray copies the group basis `|g⟩`, white is the scaled convolution
/// `μ|g,h⟩ = |g+h⟩/√D` with unit `√D|0⟩`.
pub fn build_group_pair(g: &FiniteAbelianGroup) -> ObservablePair {
    let c = Semiring::ComplexDouble;
    let d = g.order();
    let root = (d as f64).sqrt();
    let gray = ObservableStructure::copy(c, d).with_name(format!("gray:{g}"));
    let mult = SemiTensor::from_fn(c, vec![d], vec![d, d], |o, i| {
        if g.add_index(i[0], i[1]) == o[0] { C64::new(1.0 / root, 0.0) } else { C64::new(0.0, 0.0) }
    });
    let unit = SemiTensor::from_fn(c, vec![d], vec![], |o, _| if o[0] == 0 { C64::new(root, 0.0) } else { C64::new(0.0, 0.0) });
    let white = ObservableStructure::new(format!("white:{g}"), mult, unit).expect("shapes agree");
    // White classical points are the characters scaled by 1/√D, listed in
    // the element order of their index.
    white.seed_points(
        g.elements()
            .iter()
            .map(|j| {
                let chi = g.character_vector(j).expect("element of g");
                SemiTensor::column(c, chi.into_iter().map(|x| x / root).collect()).expect("length D")
            })
            .collect(),
    );
    ObservablePair::new(white, gray).expect("same object").with_group(g.clone())
}

/// The structure copying the normalised character basis of `g`.
pub fn fourier_structure(g: &FiniteAbelianGroup) -> Result<ObservableStructure> {
    let root = (g.order() as f64).sqrt();
    let basis: Vec<Vec<C64>> = g
        .elements()
        .iter()
        .map(|j| g.character_vector(j).map(|v| v.into_iter().map(|x| x / root).collect()))
        .collect::<Result<_>>()?;
    ObservableStructure::from_orthonormal_basis(format!("fourier:{g}"), &basis)
}
