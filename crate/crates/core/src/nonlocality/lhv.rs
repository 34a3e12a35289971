// SPDX-License-Identifier: Apache-2.0

//! Exhaustive search for a deterministic hidden state consistent with the
//! supports of every setting.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;

use super::MerminScenario;
use crate::error::{Error, Result};

pub const DEFAULT_SEARCH_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LhvOptions {
    /// Largest number of complete hidden states the search may face.
    pub cap: u64,
    pub workers: usize,
}

impl Default for LhvOptions {
    fn default() -> Self {
        Self { cap: DEFAULT_SEARCH_CAP, workers: 1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LhvStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HiddenAssignment {
    pub party: usize,
    pub measurement: String,
    pub outcome: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LhvResult {
    pub status: LhvStatus,
    pub witness: Option<Vec<HiddenAssignment>>,
    /// Complete hidden states tested plus partial ones rejected by pruning.
    /// Independent of the worker count.
    pub states_examined: u64,
}

impl LhvResult {
    pub fn is_feasible(&self) -> bool {
        self.status == LhvStatus::Feasible
    }
}

struct Problem {
    d: usize,
    vars: usize,
    /// Variable index of each party's measurement, per setting.
    settings: Vec<Vec<usize>>,
    /// `allowed[s][t]` for the row-major index `t` of an outcome tuple.
    allowed: Vec<Vec<bool>>,
    /// Settings whose last variable is the given one.
    checks_at: Vec<Vec<usize>>,
}

impl Problem {
    fn holds(&self, s: usize, a: &[usize]) -> bool {
        let t = self.settings[s].iter().fold(0, |acc, &v| acc * self.d + a[v]);
        self.allowed[s][t]
    }

    fn consistent_at(&self, depth: usize, a: &[usize]) -> bool {
        self.checks_at[depth].iter().all(|&s| self.holds(s, a))
    }

    fn dfs(&self, depth: usize, a: &mut [usize], count: &mut u64, cancelled: &dyn Fn() -> bool) -> bool {
        if cancelled() {
            return false;
        }
        for x in 0..self.d {
            a[depth] = x;
            if !self.consistent_at(depth, a) {
                *count += 1;
                continue;
            }
            if depth + 1 == self.vars {
                *count += 1;
                return true;
            }
            if self.dfs(depth + 1, a, count, cancelled) {
                return true;
            }
        }
        false
    }

    /// Explores the block of assignments with the given prefix.
    fn run_block(&self, prefix_len: usize, block: usize, cancelled: &dyn Fn() -> bool) -> (u64, Option<Vec<usize>>) {
        let mut a = vec![0usize; self.vars];
        let mut rest = block;
        for k in (0..prefix_len).rev() {
            a[k] = rest % self.d;
            rest /= self.d;
        }
        if (0..prefix_len).any(|k| !self.consistent_at(k, &a)) {
            return (1, None);
        }
        if prefix_len == self.vars {
            return (1, Some(a));
        }
        let mut count = 0;
        let found = self.dfs(prefix_len, &mut a, &mut count, cancelled);
        (count, found.then_some(a))
    }
}

fn build_problem(
    scenario: &MerminScenario,
    supports: &[Vec<Vec<usize>>],
) -> Result<(Problem, Vec<(usize, String)>)> {
    scenario.validate()?;
    let settings = scenario.settings();
    if supports.len() != settings.len() {
        return Err(Error::InvalidScenario(format!("{} supports for {} settings", supports.len(), settings.len())));
    }
    let d = scenario.group.order();
    let n = scenario.parties;
    let variables = scenario.variables();
    let index: BTreeMap<(usize, &str), usize> =
        variables.iter().enumerate().map(|(i, (k, m))| ((*k, m.as_str()), i)).collect();
    let settings_vars: Vec<Vec<usize>> = settings
        .iter()
        .map(|s| s.iter().enumerate().map(|(k, m)| index[&(k, m.as_str())]).collect())
        .collect();
    let size = d.pow(n as u32);
    let mut allowed = Vec::with_capacity(settings.len());
    for (s, support) in supports.iter().enumerate() {
        let mut row = vec![false; size];
        for t in support {
            if t.len() != n || t.iter().any(|&x| x >= d) {
                return Err(Error::InvalidScenario(format!("outcome tuple {t:?} does not fit setting {}", s)));
            }
            row[t.iter().fold(0, |acc, &x| acc * d + x)] = true;
        }
        allowed.push(row);
    }
    let mut checks_at = vec![Vec::new(); variables.len()];
    for (s, vs) in settings_vars.iter().enumerate() {
        if let Some(&last) = vs.iter().max() {
            checks_at[last].push(s);
        }
    }
    Ok((Problem { d, vars: variables.len(), settings: settings_vars, allowed, checks_at }, variables))
}

/// States examined in one block and the first assignment found there.
type BlockResult = (u64, Option<Vec<usize>>);

/// Depth-first search over assignments `(party, measurement) → outcome`,
/// ordered by party then measurement name. A partial assignment is dropped
/// as soon as a setting whose entries are all assigned produces a tuple
/// outside its support.
///
/// `supports` follows [`MerminScenario::settings`]. The space is split into
/// blocks by the values of the first two variables; blocks run on
/// `options.workers` threads and the witness of the lowest successful block
/// is reported.
pub fn lhv_search(scenario: &MerminScenario, supports: &[Vec<Vec<usize>>], options: LhvOptions) -> Result<LhvResult> {
    let (problem, variables) = build_problem(scenario, supports)?;
    let size = (problem.d as f64).powi(problem.vars as i32);
    if size > options.cap as f64 {
        return Err(Error::SearchCapExceeded { size, cap: options.cap });
    }
    let prefix_len = problem.vars.min(2);
    let blocks = problem.d.pow(prefix_len as u32);
    let best = AtomicUsize::new(usize::MAX);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<BlockResult>>> = Mutex::new(vec![None; blocks]);
    let work = || loop {
        let q = next.fetch_add(1, Ordering::Relaxed);
        if q >= blocks || q > best.load(Ordering::Relaxed) {
            return;
        }
        let cancelled = || best.load(Ordering::Relaxed) < q;
        let (count, witness) = problem.run_block(prefix_len, q, &cancelled);
        if witness.is_some() {
            best.fetch_min(q, Ordering::Relaxed);
        }
        slots.lock().expect("no worker panics while holding the lock")[q] = Some((count, witness));
    };
    let workers = options.workers.clamp(1, blocks.max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(work);
            }
        });
    }
    let slots = slots.into_inner().expect("workers finished");
    let mut states_examined = 0;
    for slot in slots {
        let (count, witness) = slot.expect("every block up to the first witness is explored");
        states_examined += count;
        if let Some(a) = witness {
            let witness = variables
                .iter()
                .zip(a)
                .map(|((party, m), outcome)| HiddenAssignment { party: *party, measurement: m.clone(), outcome })
                .collect();
            return Ok(LhvResult { status: LhvStatus::Feasible, witness: Some(witness), states_examined });
        }
    }
    Ok(LhvResult { status: LhvStatus::Infeasible, witness: None, states_examined })
}

/// Whether the assignment reproduces a supported tuple for every setting.
pub fn witness_is_consistent(scenario: &MerminScenario, supports: &[Vec<Vec<usize>>], witness: &[HiddenAssignment]) -> bool {
    let value: BTreeMap<(usize, &str), usize> =
        witness.iter().map(|h| ((h.party, h.measurement.as_str()), h.outcome)).collect();
    let settings = scenario.settings();
    settings.len() == supports.len()
        && settings.iter().zip(supports).all(|(s, support)| {
            let tuple: Option<Vec<usize>> = s.iter().enumerate().map(|(k, m)| value.get(&(k, m.as_str())).copied()).collect();
            tuple.is_some_and(|t| support.contains(&t))
        })
}
