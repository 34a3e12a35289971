// SPDX-License-Identifier: Apache-2.0

//! Structures and pairs that deliberately break strong complementarity,
//! used to show the checks reject what they should.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{build_group_pair, ObservablePair};
use crate::algebra::{FiniteAbelianGroup, Semiring, SemiTensor, C64};
use crate::error::Result;
use crate::observables::ObservableStructure;

/// `o` with `amplitude`-sized complex noise added to every entry of the
/// multiplication. The result is generally not a Frobenius algebra.
pub fn noisy_structure(o: &ObservableStructure, amplitude: f64, seed: u64) -> Result<ObservableStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = o.mult();
    let noise: Vec<C64> = m
        .data()
        .iter()
        .map(|x| x + C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amplitude)
        .collect();
    let mult = SemiTensor::new(m.semiring(), m.out_dims().to_vec(), m.in_dims().to_vec(), noise)?;
    ObservableStructure::new(format!("noisy:{}", o.name()), mult, o.unit().clone())
}

/// The copy structure of a random orthonormal basis close to the
/// computational one: Gram–Schmidt applied to `1 + ε·N` for Gaussian-free
/// uniform noise `N`. Always a valid observable with a full point set.
pub fn rotated_copy_structure(dim: usize, epsilon: f64, seed: u64) -> Result<ObservableStructure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors: Vec<Vec<C64>> = (0..dim)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    let base = if j == k { 1.0 } else { 0.0 };
                    C64::new(base + epsilon * rng.random_range(-1.0..1.0), epsilon * rng.random_range(-1.0..1.0))
                })
                .collect()
        })
        .collect();
    for k in 0..dim {
        for j in 0..k {
            let (head, tail) = vectors.split_at_mut(k);
            let ip: C64 = head[j].iter().zip(&tail[0]).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                *x -= ip * y;
            }
        }
        let n = vectors[k].iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        vectors[k].iter_mut().for_each(|x| *x /= n);
    }
    ObservableStructure::from_orthonormal_basis(format!("rotated{dim}"), &vectors)
}

/// The group pair of `g` with its gray basis replaced by a random nearby
/// orthonormal basis.
pub fn rotated_gray_pair(g: &FiniteAbelianGroup, epsilon: f64, seed: u64) -> Result<ObservablePair> {
    let base = build_group_pair(g);
    let gray = rotated_copy_structure(g.order(), epsilon, seed)?;
    ObservablePair::new(base.white().clone(), gray)
}

/// A coherent but not strongly complementary pair on dimension 3: the Z3
/// convolution structure against the copy structure of
/// `{|0⟩, V|1⟩, V|2⟩}`, where `V` fixes `|0⟩` and `|1⟩+|2⟩` and multiplies
/// `|1⟩−|2⟩` by `e^{iφ}`. Both units stay classical points of the other
/// colour, so coherence survives while unbiasedness does not.
pub fn coherent_candidate_z3(phi: f64) -> Result<ObservablePair> {
    let g = FiniteAbelianGroup::cyclic(3)?;
    let base = build_group_pair(&g);
    let e = C64::from_polar(1.0, phi);
    let half = C64::new(0.5, 0.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let b1 = vec![zero, half + e * half, half - e * half];
    let b2 = vec![zero, half - e * half, half + e * half];
    let gray = ObservableStructure::from_orthonormal_basis("gray:z3-twisted", &[vec![one, zero, zero], b1, b2])?;
    debug_assert_eq!(gray.semiring(), Semiring::ComplexDouble);
    ObservablePair::new(base.white().clone(), gray)
}
