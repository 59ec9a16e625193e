//! Bradley-Terry abilities from pairwise votes, fitted with the
//! minorize-maximize fixed point.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tally of votes between two items.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub item_a: String,
    pub item_b: String,
    pub wins_a: u64,
    pub wins_b: u64,
}

impl ComparisonRecord {
    pub fn new(item_a: impl Into<String>, item_b: impl Into<String>, wins_a: u64, wins_b: u64) -> Self {
        ComparisonRecord {
            item_a: item_a.into(),
            item_b: item_b.into(),
            wins_a,
            wins_b,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BtOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Pseudo-wins added to both sides of every record; 0 disables smoothing.
    pub smoothing: f64,
}

impl Default for BtOptions {
    fn default() -> Self {
        BtOptions {
            max_iter: 10_000,
            tol: 1e-9,
            smoothing: 0.0,
        }
    }
}

/// Fitted abilities, normalized to sum to one. Items are sorted by name.
#[derive(Clone, Debug, PartialEq)]
pub struct AbilityVector {
    pub items: Vec<String>,
    pub abilities: Vec<f64>,
    pub iterations_used: usize,
    pub converged: bool,
    /// Log-likelihood before the first update and after every update.
    pub log_likelihood: Vec<f64>,
}

impl AbilityVector {
    pub fn ability(&self, item: &str) -> Option<f64> {
        self.items.iter().position(|i| i == item).map(|k| self.abilities[k])
    }

    /// `ln(ability)` shifted so the weakest item scores 0.
    pub fn display_scores(&self) -> Vec<f64> {
        let logs: Vec<f64> = self.abilities.iter().map(|p| p.ln()).collect();
        let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
        logs.into_iter().map(|l| l - min).collect()
    }

    /// Item names from strongest to weakest (ties by name).
    pub fn ranking(&self) -> Vec<String> {
        let mut idx: Vec<usize> = (0..self.items.len()).collect();
        idx.sort_by(|&a, &b| self.abilities[b].total_cmp(&self.abilities[a]).then(a.cmp(&b)));
        idx.into_iter().map(|i| self.items[i].clone()).collect()
    }
}

/// Pairwise counts indexed by item position.
struct Tally {
    items: Vec<String>,
    /// `wins[i][j]`: times `i` beat `j`.
    wins: Vec<Vec<f64>>,
}

impl Tally {
    fn build(records: &[ComparisonRecord], smoothing: f64) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::InvalidInput("no comparison records".into()));
        }
        let mut index = BTreeMap::new();
        for r in records {
            if r.item_a == r.item_b {
                return Err(Error::InvalidInput(format!("item `{}` compared with itself", r.item_a)));
            }
            if r.wins_a + r.wins_b == 0 {
                return Err(Error::InvalidInput(format!(
                    "record {} vs {} has no votes",
                    r.item_a, r.item_b
                )));
            }
            index.entry(r.item_a.clone()).or_insert(0);
            index.entry(r.item_b.clone()).or_insert(0);
        }
        for (k, v) in index.values_mut().enumerate() {
            *v = k;
        }
        let n = index.len();
        let mut wins = vec![vec![0.0; n]; n];
        for r in records {
            let (a, b) = (index[&r.item_a], index[&r.item_b]);
            wins[a][b] += r.wins_a as f64 + smoothing;
            wins[b][a] += r.wins_b as f64 + smoothing;
        }
        Ok(Tally {
            items: index.into_keys().collect(),
            wins,
        })
    }

    fn games(&self, i: usize, j: usize) -> f64 {
        self.wins[i][j] + self.wins[j][i]
    }

    fn components(&self) -> Vec<Vec<String>> {
        let n = self.items.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(i) = stack.pop() {
                comp.push(i);
                for j in 0..n {
                    if !seen[j] && self.games(i, j) > 0.0 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp.into_iter().map(|i| self.items[i].clone()).collect());
        }
        out
    }

    fn log_likelihood(&self, p: &[f64]) -> f64 {
        let n = p.len();
        let mut ll = 0.0;
        for i in 0..n {
            for j in 0..n {
                if self.wins[i][j] > 0.0 {
                    ll += self.wins[i][j] * (p[i] / (p[i] + p[j])).ln();
                }
            }
        }
        ll
    }
}

/// Log-likelihood of `abilities` (ordered like the fitted items) under `records`.
pub fn bt_log_likelihood(records: &[ComparisonRecord], fit: &AbilityVector) -> Result<f64> {
    let tally = Tally::build(records, 0.0)?;
    if tally.items != fit.items {
        return Err(Error::InvalidInput("records and fit cover different items".into()));
    }
    Ok(tally.log_likelihood(&fit.abilities))
}

pub fn bt_fit(records: &[ComparisonRecord]) -> Result<AbilityVector> {
    bt_fit_with(records, &BtOptions::default())
}

/// Maximum-likelihood Bradley-Terry abilities.
///
/// Fails when the comparison graph is disconnected or an item never wins or
/// never loses, since the likelihood then has no finite maximizer.
pub fn bt_fit_with(records: &[ComparisonRecord], opts: &BtOptions) -> Result<AbilityVector> {
    if !(opts.smoothing >= 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidConfig("smoothing must be >= 0 and tol > 0".into()));
    }
    let tally = Tally::build(records, opts.smoothing)?;
    let n = tally.items.len();
    let components = tally.components();
    if components.len() > 1 {
        return Err(Error::Disconnected(components));
    }
    let total_wins: Vec<f64> = tally.wins.iter().map(|row| row.iter().sum()).collect();
    let total_losses: Vec<f64> = (0..n).map(|i| (0..n).map(|j| tally.wins[j][i]).sum()).collect();
    let no_wins: Vec<&str> = (0..n).filter(|&i| total_wins[i] == 0.0).map(|i| tally.items[i].as_str()).collect();
    let no_losses: Vec<&str> = (0..n)
        .filter(|&i| total_losses[i] == 0.0)
        .map(|i| tally.items[i].as_str())
        .collect();
    if !no_wins.is_empty() || !no_losses.is_empty() {
        return Err(Error::Degenerate(format!(
            "items without wins: [{}]; items without losses: [{}]",
            no_wins.join(", "),
            no_losses.join(", ")
        )));
    }

    let mut p = vec![1.0 / n as f64; n];
    let mut trace = vec![tally.log_likelihood(&p)];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut next: Vec<f64> = (0..n)
            .map(|i| {
                let denom: f64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| tally.games(i, j) / (p[i] + p[j]))
                    .sum();
                total_wins[i] / denom
            })
            .collect();
        let sum: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= sum);
        let delta = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        p = next;
        trace.push(tally.log_likelihood(&p));
        if delta < opts.tol {
            converged = true;
            break;
        }
    }
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= sum);
    Ok(AbilityVector {
        items: tally.items,
        abilities: p,
        iterations_used: iterations,
        converged,
        log_likelihood: trace,
    })
}
