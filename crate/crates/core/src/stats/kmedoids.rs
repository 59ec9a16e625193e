//! PAM k-medoids over z-scored feature vectors.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Per-model feature vectors (rows) over named feature columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<String>, cols: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} row ids for {} value rows",
                rows.len(),
                values.len()
            )));
        }
        if let Some((i, r)) = values.iter().enumerate().find(|(_, r)| r.len() != cols.len()) {
            return Err(Error::InvalidInput(format!(
                "row `{}` has {} values, expected {}",
                rows[i],
                r.len(),
                cols.len()
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("feature values must be finite".into()));
        }
        Ok(FeatureMatrix { rows, cols, values })
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    /// Z-scores every column (population std). Constant columns are dropped
    /// and their names returned.
    pub fn standardized(&self) -> (Vec<Vec<f64>>, Vec<String>) {
        let n = self.rows.len() as f64;
        let mut keep = Vec::new();
        let mut dropped = Vec::new();
        for (j, name) in self.cols.iter().enumerate() {
            let col = self.column(j);
            let mean = col.iter().sum::<f64>() / n;
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            if var > 0.0 {
                keep.push((j, mean, var.sqrt()));
            } else {
                log::warn!("dropping constant feature column `{name}`");
                dropped.push(name.clone());
            }
        }
        let z = self
            .values
            .iter()
            .map(|r| keep.iter().map(|&(j, m, s)| (r[j] - m) / s).collect())
            .collect();
        (z, dropped)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    /// Row indices of the medoids, in selection order.
    pub medoids: Vec<usize>,
    /// For every row, the index into `medoids` of its nearest medoid.
    pub assignment: Vec<usize>,
    /// Sum of distances from each row to its medoid.
    pub cost: f64,
    pub build_cost: f64,
    pub swaps: usize,
    pub dropped_columns: Vec<String>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pairwise Euclidean distances.
pub fn distance_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| points.iter().map(|b| euclidean(a, b)).collect())
        .collect()
}

/// Nearest medoid (first in `medoids` order on ties) and total cost.
pub fn assign(dist: &[Vec<f64>], medoids: &[usize]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let assignment = dist
        .iter()
        .map(|row| {
            let (best, d) = medoids
                .iter()
                .enumerate()
                .map(|(k, &m)| (k, row[m]))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            cost += d;
            best
        })
        .collect();
    (assignment, cost)
}

const EPS: f64 = 1e-12;

/// Picks among equally good candidates with the seeded generator.
fn pick<T: Copy>(tied: &[T], rng: &mut ChaCha8Rng) -> T {
    if tied.len() == 1 {
        tied[0]
    } else {
        *tied.choose(rng).expect("non-empty")
    }
}

/// PAM on a precomputed distance matrix: greedy BUILD, then best-improvement
/// SWAP until no swap lowers the cost.
pub fn pam(dist: &[Vec<f64>], k: usize, seed: u64) -> Result<Clustering> {
    let n = dist.len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k must be in 1..={n}, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    for _ in 0..k {
        let gains: Vec<(usize, f64)> = (0..n)
            .filter(|i| !medoids.contains(i))
            .map(|i| {
                let g = if medoids.is_empty() {
                    -dist[i].iter().sum::<f64>()
                } else {
                    (0..n).map(|j| (nearest[j] - dist[i][j]).max(0.0)).sum()
                };
                (i, g)
            })
            .collect();
        let best = gains.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
        let tied: Vec<usize> = gains.iter().filter(|g| g.1 >= best - EPS).map(|g| g.0).collect();
        let chosen = pick(&tied, &mut rng);
        medoids.push(chosen);
        for j in 0..n {
            nearest[j] = nearest[j].min(dist[chosen][j]);
        }
    }
    let (_, build_cost) = assign(dist, &medoids);

    // SWAP
    let mut cost = build_cost;
    let mut swaps = 0;
    loop {
        let mut moves: Vec<(usize, usize, f64)> = Vec::new();
        for slot in 0..k {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let mut trial = medoids.clone();
                trial[slot] = h;
                let (_, c) = assign(dist, &trial);
                moves.push((slot, h, c));
            }
        }
        let Some(best) = moves.iter().map(|m| m.2).reduce(f64::min) else {
            break;
        };
        if best >= cost - EPS {
            break;
        }
        let tied: Vec<(usize, usize)> = moves
            .iter()
            .filter(|m| m.2 <= best + EPS)
            .map(|m| (m.0, m.1))
            .collect();
        let (slot, h) = pick(&tied, &mut rng);
        medoids[slot] = h;
        cost = assign(dist, &medoids).1;
        swaps += 1;
    }
    let (assignment, cost) = assign(dist, &medoids);
    Ok(Clustering {
        medoids,
        assignment,
        cost,
        build_cost,
        swaps,
        dropped_columns: Vec::new(),
    })
}

/// Representative rows of `features`: z-score columns, Euclidean distance,
/// PAM with `k` clusters.
pub fn kmedoids(features: &FeatureMatrix, k: usize, seed: u64) -> Result<Clustering> {
    let n = features.rows().len();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("k must be in 1..={n}, got {k}")));
    }
    let (z, dropped) = features.standardized();
    let mut c = pam(&distance_matrix(&z), k, seed)?;
    c.dropped_columns = dropped;
    Ok(c)
}
