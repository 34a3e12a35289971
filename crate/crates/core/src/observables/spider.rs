// SPDX-License-Identifier: Apache-2.0

use super::ObservableStructure;
use crate::algebra::{contract_network, SemiTensor, C64};
use crate::error::{Error, Result};

/// Iterated comultiplication `D → D^{⊗m}`; `m = 0` is the counit.
pub(crate) fn comult_power(o: &ObservableStructure, m: usize) -> SemiTensor {
    match m {
        0 => o.counit(),
        1 => o.identity(),
        _ => {
            let delta = o.comult();
            let mut t = delta.clone();
            for k in 2..m {
                t = t.apply_to_output(k - 1, &delta).expect("leg exists");
            }
            t
        }
    }
}

impl ObservableStructure {
    /// The spider with `n` inputs and `m` outputs, `δ_m ∘ L ∘ μ_n`, where `L`
    /// is multiplication by the decoration (identity when absent).
    pub fn spider(&self, n: usize, m: usize, decoration: Option<&SemiTensor>) -> Result<SemiTensor> {
        let core = match decoration {
            Some(psi) => {
                if psi.out_dims() != [self.dim()] || !psi.in_dims().is_empty() {
                    return Err(Error::DimensionMismatch(format!(
                        "decoration {:?}←{:?} is not a state on {}",
                        psi.out_dims(),
                        psi.in_dims(),
                        self.dim()
                    )));
                }
                if psi.semiring() != self.semiring() {
                    return Err(Error::SemiringMismatch(self.semiring(), psi.semiring()));
                }
                self.left_mult_by(psi)?
            }
            None => self.identity(),
        };
        let top = comult_power(self, m).compose(&core)?;
        top.compose(&comult_power(self, n).dagger())
    }
}

/// `μ ∘ (a ⊗ b)`: how decorations combine when spiders fuse.
pub fn combine_decorations(o: &ObservableStructure, a: Option<&SemiTensor>, b: Option<&SemiTensor>) -> Result<Option<SemiTensor>> {
    Ok(match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(o.multiply_states(x, y)?),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FuseWitness {
    pub scalar: Option<C64>,
    pub residual: f64,
}

impl FuseWitness {
    pub fn holds(&self, tol: f64) -> bool {
        self.scalar.is_some() && self.residual <= tol
    }
}

/// A spider shape: inputs, outputs, optional decoration.
pub type SpiderSpec<'a> = (usize, usize, Option<&'a SemiTensor>);

/// Plugs the last `k` outputs of spider `a` into the first `k` inputs of
/// spider `b` and compares the composite with the single fused spider.
pub fn fuse_check(o: &ObservableStructure, a: SpiderSpec<'_>, b: SpiderSpec<'_>, k: usize) -> Result<FuseWitness> {
    let (n1, m1, d1) = a;
    let (n2, m2, d2) = b;
    if k == 0 || k > m1 || k > n2 {
        return Err(Error::ArityMismatch(format!("cannot join {k} wires between ({n1},{m1}) and ({n2},{m2})")));
    }
    let sa = o.spider(n1, m1, d1)?;
    let sb = o.spider(n2, m2, d2)?;
    // Labels: a_in 0..n1, a_out, b_in (first k shared with a_out tail), b_out.
    let mut next = 0usize;
    let mut fresh = |count: usize| -> Vec<usize> {
        let v: Vec<usize> = (next..next + count).collect();
        next += count;
        v
    };
    let a_in = fresh(n1);
    let a_out = fresh(m1);
    let b_in_rest = fresh(n2 - k);
    let b_out = fresh(m2);
    let mut b_in: Vec<usize> = a_out[m1 - k..].to_vec();
    b_in.extend_from_slice(&b_in_rest);

    let la: Vec<usize> = a_out.iter().chain(&a_in).copied().collect();
    let lb: Vec<usize> = b_out.iter().chain(&b_in).copied().collect();
    let outs: Vec<usize> = a_out[..m1 - k].iter().chain(&b_out).copied().collect();
    let ins: Vec<usize> = a_in.iter().chain(&b_in_rest).copied().collect();
    let composite = contract_network(o.semiring(), vec![(sa, la), (sb, lb)], &outs, &ins)?;

    let dec = combine_decorations(o, d1, d2)?;
    let fused = o.spider(ins.len(), outs.len(), dec.as_ref())?;
    witness(&composite, &fused)
}

/// Feeds output `m` of an `(n+1, m+1)` spider back into its last input and
/// compares with the `(n, m)` spider.
pub fn loop_check(o: &ObservableStructure, n: usize, m: usize, decoration: Option<&SemiTensor>) -> Result<FuseWitness> {
    let s = o.spider(n + 1, m + 1, decoration)?;
    let outs: Vec<usize> = (0..m).collect();
    let ins: Vec<usize> = (m + 1..m + 1 + n).collect();
    let loop_label = m;
    let mut labels: Vec<usize> = outs.clone();
    labels.push(loop_label);
    labels.extend(&ins);
    labels.push(loop_label);
    let traced = contract_network(o.semiring(), vec![(s, labels)], &outs, &ins)?;
    let fused = o.spider(n, m, decoration)?;
    witness(&traced, &fused)
}

fn witness(lhs: &SemiTensor, rhs: &SemiTensor) -> Result<FuseWitness> {
    let p = SemiTensor::proportionality(lhs, rhs)?;
    Ok(FuseWitness { scalar: p.scalar, residual: p.residual })
}
