// SPDX-License-Identifier: Apache-2.0

//! Named models: group pairs over the complex numbers, relational
//! observables, and the stabilizer phase candidates.

mod frel;
mod phase_group;

use serde::Serialize;

use crate::algebra::{FiniteAbelianGroup, SemiTensor, Semiring, C64};
use crate::error::{Error, Result};
use crate::observables::ObservableStructure;
use crate::pairs::{build_group_pair, ObservablePair};

pub use frel::{
    frel_z2_pair, relational_structure, spek_observable, RelationEdit, SpekObservable, MAX_SPEK_EDITS,
    PRINTED_SPEK_COUNIT, PRINTED_SPEK_LINES,
};
pub use phase_group::{enumerate_phase_group, stab_phase_candidates, PhaseGroup};

/// Largest group accepted by [`fhilb_model`].
pub const MAX_FHILB_ORDER: usize = 16;

/// Law-check tolerance for complex catalog structures.
pub const LOAD_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ModelCatalogEntry {
    pub name: String,
    pub semiring: Semiring,
    pub description: String,
    /// How the entry was obtained, including any repair of its source data.
    pub provenance: String,
    pub structures: Vec<ObservableStructure>,
    pub pair: Option<ObservablePair>,
    pub group: Option<FiniteAbelianGroup>,
    /// Finite phase candidates for complex structures.
    pub phase_candidates: Option<Vec<SemiTensor>>,
}

impl ModelCatalogEntry {
    pub fn exponent(&self) -> Option<u64> {
        self.group.as_ref().map(FiniteAbelianGroup::exponent)
    }

    /// Values of every character, indexed `[j][g]`.
    pub fn characters(&self) -> Option<Vec<Vec<C64>>> {
        let g = self.group.as_ref()?;
        g.elements().iter().map(|j| g.character_vector(j).ok()).collect()
    }

    fn verify(self) -> Result<Self> {
        let tol = if self.semiring.is_boolean() { 0.0 } else { LOAD_TOL };
        let mut all = self.structures.clone();
        if let Some(p) = &self.pair {
            all.push(p.white().clone());
            all.push(p.gray().clone());
        }
        for s in &all {
            let report = s.check_laws(tol);
            if !report.all_hold() {
                return Err(Error::ModelLoad(
                    self.name.clone(),
                    format!("{} fails its laws (residual {:.3e})", s.name(), report.max_residual()),
                ));
            }
        }
        Ok(self)
    }
}

/// One line of the catalog listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogListing {
    pub name: String,
    pub semiring: Semiring,
    pub description: String,
}

pub fn catalog() -> Vec<CatalogListing> {
    let row = |name: &str, semiring, description: &str| CatalogListing {
        name: name.into(),
        semiring,
        description: description.into(),
    };
    vec![
        row(
            "fhilb:<G>",
            Semiring::ComplexDouble,
            "group basis copy and scaled convolution for a finite abelian group of order at most 16, e.g. fhilb:Z2xZ4",
        ),
        row("frel:z2", Semiring::Boolean, "copy and parity relations on a two-element set"),
        row("frel:spek", Semiring::Boolean, "the four-element relational observable of the toy theory"),
        row("stab:qubit", Semiring::ComplexDouble, "qubit copy structure with the stabilizer phases (1, i^k)"),
    ]
}

pub fn fhilb_model(g: &FiniteAbelianGroup) -> Result<ModelCatalogEntry> {
    let name = format!("fhilb:{g}");
    if g.order() > MAX_FHILB_ORDER {
        return Err(Error::ModelLoad(name, format!("order {} exceeds {MAX_FHILB_ORDER}", g.order())));
    }
    ModelCatalogEntry {
        description: format!("group pair for {g}, exponent {}", g.exponent()),
        provenance: "built from the group: copy on the element basis, convolution scaled by 1/sqrt(|G|)".into(),
        semiring: Semiring::ComplexDouble,
        structures: Vec::new(),
        pair: Some(build_group_pair(g)),
        group: Some(g.clone()),
        phase_candidates: None,
        name,
    }
    .verify()
}

pub fn frel_z2_model() -> Result<ModelCatalogEntry> {
    ModelCatalogEntry {
        name: "frel:z2".into(),
        semiring: Semiring::Boolean,
        description: "copy and parity relations on {0, 1}".into(),
        provenance: "white copies i to (i, i); gray relates 0 to {(0,0), (1,1)} and 1 to {(0,1), (1,0)}".into(),
        structures: Vec::new(),
        pair: Some(frel_z2_pair()),
        group: None,
        phase_candidates: None,
    }
    .verify()
}

pub fn spek_model() -> Result<ModelCatalogEntry> {
    let spek = spek_observable()?;
    let printed: Vec<String> = PRINTED_SPEK_LINES
        .iter()
        .map(|(x, ps)| format!("{x} ~ {{({},{}), ({},{})}}", ps[0].0, ps[0].1, ps[1].0, ps[1].1))
        .collect();
    let edits: Vec<String> = spek.corrections.iter().map(ToString::to_string).collect();
    ModelCatalogEntry {
        name: "frel:spek".into(),
        semiring: Semiring::Boolean,
        description: "four-element relational observable".into(),
        provenance: format!(
            "printed comultiplication {}; counit {{{}, {}}}; repaired by {} edit(s): {}",
            printed.join("; "),
            PRINTED_SPEK_COUNIT[0],
            PRINTED_SPEK_COUNIT[1],
            edits.len(),
            edits.join("; ")
        ),
        structures: vec![spek.structure],
        pair: None,
        group: None,
        phase_candidates: None,
    }
    .verify()
}

pub fn stab_model() -> Result<ModelCatalogEntry> {
    ModelCatalogEntry {
        name: "stab:qubit".into(),
        semiring: Semiring::ComplexDouble,
        description: "qubit copy structure with stabilizer phases".into(),
        provenance: "phase candidates (1, i^k), k = 0..3; the Clifford subcategory itself is not built".into(),
        structures: vec![ObservableStructure::copy(Semiring::ComplexDouble, 2).with_name("stab:z")],
        pair: None,
        group: None,
        phase_candidates: Some(stab_phase_candidates()),
    }
    .verify()
}

/// Resolves `fhilb:<group>`, `frel:z2`, `frel:spek` or `stab:qubit`. Group
/// names are normalised, so `fhilb:Z2 x Z4` loads `fhilb:Z2xZ4`.
pub fn load_model(name: &str) -> Result<ModelCatalogEntry> {
    let lower = name.trim().to_lowercase();
    if let Some(rest) = lower.strip_prefix("fhilb:") {
        let g: FiniteAbelianGroup = rest.parse().map_err(|_| Error::UnknownModel(name.to_string()))?;
        return fhilb_model(&g);
    }
    match lower.as_str() {
        "frel:z2" => frel_z2_model(),
        "frel:spek" => spek_model(),
        "stab:qubit" => stab_model(),
        _ => Err(Error::UnknownModel(name.to_string())),
    }
}
