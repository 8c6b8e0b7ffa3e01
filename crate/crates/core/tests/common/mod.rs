#![allow(dead_code)]

use majorize_core::{Experiment, StochasticMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn exp(cols: &[&[f64]]) -> Experiment {
    Experiment::from_columns(&cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
}

/// Experiment from integer weights, each column divided by its sum.
pub fn exp_int(cols: &[&[u32]]) -> Experiment {
    let cols: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let s: u32 = c.iter().sum();
            c.iter().map(|&x| x as f64 / s as f64).collect()
        })
        .collect();
    Experiment::from_columns(&cols).unwrap()
}

fn normalise(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Probability vector with entries bounded away from zero where positive;
/// `zero_prob` is the chance of each entry being zero (at least one stays positive).
pub fn prob_vector(rng: &mut impl Rng, n: usize, zero_prob: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(0.05..1.0) }).collect();
    if v.iter().all(|&x| x == 0.0) {
        v[rng.gen_range(0..n)] = rng.gen_range(0.05..1.0);
    }
    normalise(&mut v);
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Minimal,
    Dominating,
    Dichotomy,
}

pub const FAMILIES: [Family; 3] = [Family::Minimal, Family::Dominating, Family::Dichotomy];

/// Random unit-norm experiment in the given family with `n` rows and `d` columns
/// (`d` is forced to 2 for dichotomies).
pub fn experiment(rng: &mut impl Rng, family: Family, n: usize, d: usize) -> Experiment {
    let d = if family == Family::Dichotomy { 2 } else { d };
    let mut rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.05..1.0) }).collect())
        .collect();
    // a common positive row keeps the intersection of supports nonempty
    let shared = rng.gen_range(0..n);
    rows[shared].iter_mut().for_each(|x| *x = rng.gen_range(0.05..1.0));
    if family != Family::Minimal {
        for r in rows.iter_mut() {
            if r[d - 1] == 0.0 && r.iter().any(|&x| x > 0.0) {
                r[d - 1] = rng.gen_range(0.05..1.0);
            }
        }
    }
    let mut cols: Vec<Vec<f64>> = (0..d).map(|k| rows.iter().map(|r| r[k]).collect()).collect();
    cols.iter_mut().for_each(|c| normalise(c));
    Experiment::from_columns(&cols).unwrap()
}

/// Random column-stochastic `m × n` matrix with some zero entries.
pub fn stochastic(rng: &mut impl Rng, m: usize, n: usize) -> StochasticMatrix {
    let mut entries = vec![0.0; m * n];
    for j in 0..n {
        let col = prob_vector(rng, m, 0.4);
        for i in 0..m {
            entries[i * n + j] = col[i];
        }
    }
    StochasticMatrix::new(m, n, entries, 1e-12).unwrap()
}

/// Random doubly stochastic matrix as a mixture of permutations.
pub fn doubly_stochastic(rng: &mut impl Rng, n: usize) -> StochasticMatrix {
    let mut entries = vec![0.0; n * n];
    let weights = prob_vector(rng, 3, 0.0);
    for w in weights {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for (j, &i) in perm.iter().enumerate() {
            entries[i * n + j] += w;
        }
    }
    StochasticMatrix::new(n, n, entries, 1e-12).unwrap()
}

/// Shuffles the rows and pads with zero rows; the result is the same experiment.
pub fn disguise(rng: &mut impl Rng, e: &Experiment) -> Experiment {
    let mut rows: Vec<Vec<f64>> = e.rows().map(<[f64]>::to_vec).collect();
    for _ in 0..rng.gen_range(0..3) {
        rows.push(vec![0.0; e.n_cols()]);
    }
    for i in (1..rows.len()).rev() {
        rows.swap(i, rng.gen_range(0..=i));
    }
    Experiment::from_rows(e.n_cols(), &rows).unwrap()
}

/// `Q = TP` for a random stochastic `T` with `m` output rows.
pub fn processed(rng: &mut impl Rng, p: &Experiment, m: usize) -> Experiment {
    stochastic(rng, m, p.n_rows()).apply(p).unwrap()
}

/// Relative majorization of dichotomies through Lorenz curves: `(a, b)`
/// majorizes `(a', b')` iff the concave curve of cumulative `(b, a)` pairs,
/// taken in order of decreasing `a/b`, lies above the other one.
pub fn lorenz_dominates(p: &Experiment, q: &Experiment, tol: f64) -> bool {
    fn curve(e: &Experiment) -> Vec<(f64, f64)> {
        let mut rows: Vec<(f64, f64)> = e.rows().map(|r| (r[0], r[1])).collect();
        rows.sort_by(|x, y| (y.0 * x.1).total_cmp(&(x.0 * y.1)));
        let mut pts = vec![(0.0, 0.0)];
        for (a, b) in rows {
            let (x, y) = *pts.last().unwrap();
            pts.push((x + b, y + a));
        }
        pts
    }
    fn height(pts: &[(f64, f64)], x: f64) -> f64 {
        // highest value over the curve's points at abscissa x (vertical segments allowed)
        let mut best = f64::NEG_INFINITY;
        for w in pts.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 <= x && x <= x1 {
                let y = if x1 > x0 { y0 + (y1 - y0) * (x - x0) / (x1 - x0) } else { y1 };
                best = best.max(y);
            }
        }
        if x >= pts.last().unwrap().0 {
            best = best.max(pts.last().unwrap().1);
        }
        best
    }
    let cp = curve(p);
    curve(q).iter().all(|&(x, y)| height(&cp, x.min(1.0)) >= y - tol)
}

/// Column-stochastic matrix fixing `gamma`: Metropolis moves with symmetric
/// random rates, so `t[i][j]·γ_j = t[j][i]·γ_i`.
pub fn gibbs_preserving(rng: &mut impl Rng, gamma: &[f64]) -> Vec<Vec<f64>> {
    let d = gamma.len();
    let mut t = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..i {
            let rate = rng.gen_range(0.05..1.0) / (d - 1) as f64;
            t[i][j] = rate * (gamma[i] / gamma[j]).min(1.0);
            t[j][i] = rate * (gamma[j] / gamma[i]).min(1.0);
        }
    }
    for j in 0..d {
        let off: f64 = t.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, row)| row[j]).sum();
        t[j][j] = 1.0 - off;
    }
    t
}

pub fn apply(t: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    t.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}
