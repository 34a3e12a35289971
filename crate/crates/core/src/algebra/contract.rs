// SPDX-License-Identifier: Apache-2.0

//! Contraction of labelled tensor networks.
//!
//! Each tensor carries one label per leg (outputs then inputs). A label that
//! occurs twice is summed over; a label that occurs once is open and must be
//! listed in the requested result order. Pairwise contractions are chosen
//! greedily by smallest intermediate size.

use std::collections::HashMap;

use super::semiring::{Semiring, C64};
use super::tensor::SemiTensor;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct Labeled {
    labels: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Labeled {
    fn size(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Contracts `tensors` and returns the result with output legs labelled
/// `out_labels` and input legs labelled `in_labels`, in that order.
pub fn contract_network(
    semiring: Semiring,
    tensors: Vec<(SemiTensor, Vec<usize>)>,
    out_labels: &[usize],
    in_labels: &[usize],
) -> Result<SemiTensor> {
    let mut dims_of: HashMap<usize, usize> = HashMap::new();
    let mut count: HashMap<usize, usize> = HashMap::new();
    let mut nodes = Vec::with_capacity(tensors.len());
    for (t, labels) in tensors {
        if t.semiring() != semiring {
            return Err(Error::SemiringMismatch(semiring, t.semiring()));
        }
        let mut dims = t.out_dims().to_vec();
        dims.extend_from_slice(t.in_dims());
        if dims.len() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} legs but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        for (&l, &d) in labels.iter().zip(&dims) {
            if *dims_of.entry(l).or_insert(d) != d {
                return Err(Error::DimensionMismatch(format!("label {l} joins legs of different dimension")));
            }
            *count.entry(l).or_insert(0) += 1;
        }
        nodes.push(Labeled { labels, dims, data: t.into_data() });
    }
    let open: Vec<usize> = out_labels.iter().chain(in_labels).copied().collect();
    for &l in &open {
        if count.get(&l) != Some(&1) {
            return Err(Error::DimensionMismatch(format!("open label {l} must occur exactly once")));
        }
    }
    for (&l, &c) in &count {
        if c > 2 || (c == 1 && !open.contains(&l)) {
            return Err(Error::DimensionMismatch(format!("label {l} occurs {c} times")));
        }
    }

    let mut nodes: Vec<Labeled> = nodes.into_iter().map(|n| self_trace(semiring, n)).collect();
    if nodes.is_empty() {
        nodes.push(Labeled { labels: vec![], dims: vec![], data: vec![semiring.one()] });
    }
    while nodes.len() > 1 {
        let (i, j) = pick_pair(&nodes);
        let a = nodes.swap_remove(i);
        let b = nodes.swap_remove(j);
        nodes.push(contract_pair(semiring, a, b));
    }
    let result = nodes.pop().expect("one tensor remains");
    let perm: Vec<usize> = open
        .iter()
        .map(|l| result.labels.iter().position(|x| x == l).expect("open label survives"))
        .collect();
    let data = permute(&result.data, &result.dims, &perm);
    let out_dims = out_labels.iter().map(|l| dims_of[l]).collect();
    let in_dims = in_labels.iter().map(|l| dims_of[l]).collect();
    SemiTensor::new(semiring, out_dims, in_dims, data)
}

/// Indices `(i, j)` with `i > j` of the pair to contract next.
fn pick_pair(nodes: &[Labeled]) -> (usize, usize) {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..nodes.len() {
        for j in 0..i {
            let shared = nodes[i].labels.iter().any(|l| nodes[j].labels.contains(l));
            if !shared {
                continue;
            }
            let size = result_size(&nodes[i], &nodes[j]);
            if best.is_none_or(|(s, _, _)| size < s) {
                best = Some((size, i, j));
            }
        }
    }
    if let Some((_, i, j)) = best {
        return (i, j);
    }
    // Disconnected: take the outer product of the two smallest tensors.
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&k| (nodes[k].size(), k));
    let (a, b) = (order[0], order[1]);
    (a.max(b), a.min(b))
}

fn result_size(a: &Labeled, b: &Labeled) -> usize {
    let fa: usize = a.labels.iter().zip(&a.dims).filter(|(l, _)| !b.labels.contains(l)).map(|(_, d)| d).product();
    let fb: usize = b.labels.iter().zip(&b.dims).filter(|(l, _)| !a.labels.contains(l)).map(|(_, d)| d).product();
    fa * fb
}

fn self_trace(semiring: Semiring, mut t: Labeled) -> Labeled {
    loop {
        let mut pair = None;
        'outer: for i in 0..t.labels.len() {
            for j in i + 1..t.labels.len() {
                if t.labels[i] == t.labels[j] {
                    pair = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = pair else { return t };
        let mut perm: Vec<usize> = (0..t.labels.len()).filter(|&k| k != i && k != j).collect();
        perm.push(i);
        perm.push(j);
        let data = permute(&t.data, &t.dims, &perm);
        let d = t.dims[i];
        let rest: Vec<usize> = perm[..perm.len() - 2].to_vec();
        let rows: usize = rest.iter().map(|&k| t.dims[k]).product();
        let mut out = vec![C64::new(0.0, 0.0); rows];
        for (r, o) in out.iter_mut().enumerate() {
            let base = r * d * d;
            let s: C64 = (0..d).map(|k| data[base + k * d + k]).sum();
            *o = semiring.normalize(s);
        }
        t = Labeled {
            labels: rest.iter().map(|&k| t.labels[k]).collect(),
            dims: rest.iter().map(|&k| t.dims[k]).collect(),
            data: out,
        };
    }
}

fn contract_pair(semiring: Semiring, a: Labeled, b: Labeled) -> Labeled {
    let shared: Vec<usize> = a.labels.iter().copied().filter(|l| b.labels.contains(l)).collect();
    let free_a: Vec<usize> = (0..a.labels.len()).filter(|&k| !shared.contains(&a.labels[k])).collect();
    let free_b: Vec<usize> = (0..b.labels.len()).filter(|&k| !shared.contains(&b.labels[k])).collect();
    let sa: Vec<usize> = shared.iter().map(|l| a.labels.iter().position(|x| x == l).unwrap()).collect();
    let sb: Vec<usize> = shared.iter().map(|l| b.labels.iter().position(|x| x == l).unwrap()).collect();

    let perm_a: Vec<usize> = free_a.iter().chain(&sa).copied().collect();
    let perm_b: Vec<usize> = sb.iter().chain(&free_b).copied().collect();
    let da = permute(&a.data, &a.dims, &perm_a);
    let db = permute(&b.data, &b.dims, &perm_b);
    let m: usize = free_a.iter().map(|&k| a.dims[k]).product();
    let k: usize = sa.iter().map(|&x| a.dims[x]).product();
    let n: usize = free_b.iter().map(|&x| b.dims[x]).product();

    let mut out = vec![C64::new(0.0, 0.0); m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let x = da[i * k + p];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for (o, &y) in row.iter_mut().zip(&db[p * n..(p + 1) * n]) {
                *o += x * y;
            }
        }
    }
    if semiring.is_boolean() {
        out.iter_mut().for_each(|x| *x = semiring.normalize(*x));
    }
    Labeled {
        labels: free_a.iter().map(|&x| a.labels[x]).chain(free_b.iter().map(|&x| b.labels[x])).collect(),
        dims: free_a.iter().map(|&x| a.dims[x]).chain(free_b.iter().map(|&x| b.dims[x])).collect(),
        data: out,
    }
}

/// Transposes a row-major array so that new leg `i` is old leg `perm[i]`.
pub(crate) fn permute(data: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return data.to_vec();
    }
    let rank = dims.len();
    let mut old_strides = vec![1usize; rank];
    for k in (0..rank.saturating_sub(1)).rev() {
        old_strides[k] = old_strides[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; rank];
    let mut offset = 0usize;
    for _ in 0..data.len() {
        out.push(data[offset]);
        for k in (0..rank).rev() {
            idx[k] += 1;
            offset += strides[k];
            if idx[k] < new_dims[k] {
                break;
            }
            offset -= strides[k] * new_dims[k];
            idx[k] = 0;
        }
    }
    out
}
