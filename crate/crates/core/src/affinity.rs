//! Affinity propagation: exemplar selection by damped message passing.
//!
//! Messages are updated matrix-at-a-time. Responsibility rows and the
//! availability write pass are row-parallel; every output element is
//! produced by one sequential inner loop, so parallel runs are
//! byte-identical to the sequential reference.

use std::time::Instant;

use rayon::prelude::*;

use crate::assignment::{Algorithm, Assignment};
use crate::error::{Error, Result};
use crate::numerics::{squared_euclidean_unchecked, DenseMatrix, SeededRng};

/// How the preference (self-similarity) diagonal is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PreferencePolicy {
    /// Median of the off-diagonal similarities (even count: mean of the
    /// two central order statistics).
    MedianOffDiagonal,
    Scalar(f64),
}

#[derive(Debug, Clone)]
pub struct ApParams {
    /// Damping factor in `[0.5, 1)`.
    pub damping: f64,
    pub max_iter: usize,
    /// Consecutive iterations with an unchanged exemplar set that trigger
    /// early stop.
    pub convergence_window: usize,
    pub preference: PreferencePolicy,
    /// Seeds the symmetry-breaking perturbation only.
    pub seed: u64,
    /// Disables the perturbation; used by the permutation-equivariance
    /// tests.
    pub perturb: bool,
}

impl Default for ApParams {
    fn default() -> Self {
        Self {
            damping: 0.9,
            max_iter: 500,
            convergence_window: 15,
            preference: PreferencePolicy::MedianOffDiagonal,
            seed: 0,
            perturb: true,
        }
    }
}

impl ApParams {
    fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.damping) {
            return Err(Error::Parameter(format!(
                "damping must be in [0.5, 1), got {}",
                self.damping
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if self.convergence_window == 0 {
            return Err(Error::Parameter("convergence_window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Message-passing state: similarities with the preference diagonal,
/// responsibilities, and availabilities.
#[derive(Debug, Clone)]
pub struct ApState {
    pub n: usize,
    pub s: DenseMatrix,
    pub r: DenseMatrix,
    pub a: DenseMatrix,
    pub iteration: usize,
    pub preference: f64,
}

/// Bytes needed by the three dense n-by-n message matrices.
pub fn ap_memory_bytes(n: usize) -> u64 {
    3 * 8 * (n as u64) * (n as u64)
}

/// Builds the similarity matrix `s(i,k) = -||x_i - x_k||^2` with the
/// preference on the diagonal and, unless disabled, a tiny seeded
/// perturbation (1e-12 of the similarity range) added to every
/// off-diagonal entry to break exemplar-choice ties on symmetric data.
pub fn similarity_matrix(x: &DenseMatrix, params: &ApParams) -> Result<ApState> {
    params.validate()?;
    let n = x.rows();
    if n < 2 {
        return Err(Error::Parameter(format!(
            "affinity propagation needs at least 2 rows, got {n}"
        )));
    }
    let mut s = DenseMatrix::zeros(n, n);
    s.par_rows_mut().enumerate().for_each(|(i, row)| {
        let ri = x.row(i);
        for (k, slot) in row.iter_mut().enumerate() {
            if i != k {
                *slot = -squared_euclidean_unchecked(ri, x.row(k));
            }
        }
    });

    let preference = match params.preference {
        PreferencePolicy::Scalar(p) => {
            if !p.is_finite() {
                return Err(Error::Parameter("preference must be finite".into()));
            }
            p
        }
        PreferencePolicy::MedianOffDiagonal => median_off_diagonal(&s),
    };

    if params.perturb {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            for (k, &v) in s.row(i).iter().enumerate() {
                if i != k {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
        let scale = 1e-12 * (hi - lo);
        if scale > 0.0 {
            let mut rng = SeededRng::new(params.seed);
            for i in 0..n {
                let row = s.row_mut(i);
                for (k, slot) in row.iter_mut().enumerate() {
                    if i != k {
                        *slot += scale * rng.next_f64();
                    }
                }
            }
        }
    }

    for k in 0..n {
        s.set(k, k, preference);
    }

    Ok(ApState {
        n,
        s,
        r: DenseMatrix::zeros(n, n),
        a: DenseMatrix::zeros(n, n),
        iteration: 0,
        preference,
    })
}

fn median_off_diagonal(s: &DenseMatrix) -> f64 {
    let n = s.rows();
    let mut vals = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for (k, &v) in s.row(i).iter().enumerate() {
            if i != k {
                vals.push(v);
            }
        }
    }
    let m = vals.len();
    // even count by construction: mean of the two central order statistics
    let (_, hi_med, _) = vals.select_nth_unstable_by(m / 2, f64::total_cmp);
    let hi = *hi_med;
    let (_, lo_med, _) = vals.select_nth_unstable_by(m / 2 - 1, f64::total_cmp);
    let lo = *lo_med;
    (lo + hi) / 2.0
}

/// One responsibility sweep:
/// `r(i,k) <- damping * r(i,k) + (1 - damping) * (s(i,k) - max_{k' != k} (a(i,k') + s(i,k')))`.
pub fn update_responsibilities(state: &mut ApState, damping: f64) {
    let n = state.n;
    let s = &state.s;
    let a = &state.a;
    state.r.par_rows_mut().enumerate().for_each(|(i, r_row)| {
        let s_row = s.row(i);
        let a_row = a.row(i);
        // largest and second-largest of a + s over the row
        let mut max1 = f64::NEG_INFINITY;
        let mut max2 = f64::NEG_INFINITY;
        let mut arg1 = 0usize;
        for k in 0..n {
            let t = a_row[k] + s_row[k];
            if t > max1 {
                max2 = max1;
                max1 = t;
                arg1 = k;
            } else if t > max2 {
                max2 = t;
            }
        }
        for k in 0..n {
            let competing = if k == arg1 { max2 } else { max1 };
            let candidate = s_row[k] - competing;
            r_row[k] = damping * r_row[k] + (1.0 - damping) * candidate;
        }
    });
}

/// One availability sweep:
/// off-diagonal `a(i,k) <- damping * a(i,k) + (1 - damping) * min(0, r(k,k) + sum_{i' not in {i,k}} max(0, r(i',k)))`,
/// diagonal `a(k,k) <- damping * a(k,k) + (1 - damping) * sum_{i' != k} max(0, r(i',k))`.
pub fn update_availabilities(state: &mut ApState, damping: f64) {
    let n = state.n;
    // per-column sums of positive responsibilities, excluding the diagonal;
    // accumulated in ascending row order
    let mut pos_sum = vec![0.0f64; n];
    let mut diag = vec![0.0f64; n];
    for i in 0..n {
        let row = state.r.row(i);
        diag[i] = row[i];
        for (k, &v) in row.iter().enumerate() {
            if i != k && v > 0.0 {
                pos_sum[k] += v;
            }
        }
    }
    let r = &state.r;
    state.a.par_rows_mut().enumerate().for_each(|(i, a_row)| {
        let r_row = r.row(i);
        for k in 0..n {
            let candidate = if i == k {
                pos_sum[k]
            } else {
                let contribution = r_row[k].max(0.0);
                (diag[k] + pos_sum[k] - contribution).min(0.0)
            };
            a_row[k] = damping * a_row[k] + (1.0 - damping) * candidate;
        }
    });
}

/// Runs damped message passing to convergence (or `max_iter`), then labels
/// every point by its best exemplar.
pub fn ap_fit(x: &DenseMatrix, params: &ApParams) -> Result<Assignment> {
    let start = Instant::now();
    let mut state = similarity_matrix(x, params)?;
    let n = state.n;

    let mut prev_exemplars: Vec<usize> = Vec::new();
    let mut stable = 0usize;
    let mut converged = false;
    for it in 1..=params.max_iter {
        state.iteration = it;
        update_responsibilities(&mut state, params.damping);
        update_availabilities(&mut state, params.damping);
        let exemplars = current_exemplars(&state);
        if !exemplars.is_empty() && exemplars == prev_exemplars {
            stable += 1;
            if stable >= params.convergence_window {
                converged = true;
                break;
            }
        } else {
            stable = 0;
        }
        prev_exemplars = exemplars;
    }

    let mut exemplars = current_exemplars(&state);
    let mut warning = None;
    if exemplars.is_empty() {
        // no point accumulated positive evidence; fall back to the single
        // best candidate
        let mut best = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for k in 0..n {
            let v = state.r.get(k, k) + state.a.get(k, k);
            if v > best_v {
                best_v = v;
                best = k;
            }
        }
        exemplars = vec![best];
        converged = false;
        warning = Some("no exemplar emerged; fell back to the best candidate".into());
    }

    let labels = label_by_similarity(&state, &exemplars);
    let net = net_similarity(&labels, &exemplars, &state)?;

    Ok(Assignment {
        labels,
        k: exemplars.len(),
        exemplars: Some(exemplars),
        iterations: state.iteration,
        converged,
        inertia: None,
        net_similarity: Some(net),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::Ap,
        seed: params.seed,
        warning,
    })
}

fn current_exemplars(state: &ApState) -> Vec<usize> {
    (0..state.n)
        .filter(|&k| state.r.get(k, k) + state.a.get(k, k) > 0.0)
        .collect()
}

/// Exemplars label themselves; every other point joins its most similar
/// exemplar, ties toward the lowest exemplar index. Clusters are numbered
/// by ascending exemplar index.
fn label_by_similarity(state: &ApState, exemplars: &[usize]) -> Vec<usize> {
    let mut cluster_of_exemplar = vec![usize::MAX; state.n];
    for (c, &e) in exemplars.iter().enumerate() {
        cluster_of_exemplar[e] = c;
    }
    (0..state.n)
        .map(|i| {
            if cluster_of_exemplar[i] != usize::MAX {
                return cluster_of_exemplar[i];
            }
            let row = state.s.row(i);
            let mut best = 0usize;
            let mut best_v = f64::NEG_INFINITY;
            for (c, &e) in exemplars.iter().enumerate() {
                if row[e] > best_v {
                    best_v = row[e];
                    best = c;
                }
            }
            best
        })
        .collect()
}

/// The objective affinity propagation maximizes: similarities of
/// non-exemplars to their exemplar plus the preferences of the chosen
/// exemplars.
pub fn net_similarity(labels: &[usize], exemplars: &[usize], state: &ApState) -> Result<f64> {
    if labels.len() != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            got: labels.len(),
        });
    }
    for (c, &e) in exemplars.iter().enumerate() {
        if e >= state.n {
            return Err(Error::InconsistentLabels(format!("exemplar {e} out of range")));
        }
        if labels[e] != c {
            return Err(Error::InconsistentLabels(format!(
                "exemplar {e} is not labeled to its own cluster {c}"
            )));
        }
    }
    let mut is_exemplar = vec![false; state.n];
    for &e in exemplars {
        is_exemplar[e] = true;
    }
    let mut assign_sum = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        if label >= exemplars.len() {
            return Err(Error::InconsistentLabels(format!(
                "label {label} of point {i} names no exemplar"
            )));
        }
        if !is_exemplar[i] {
            assign_sum += state.s.get(i, exemplars[label]);
        }
    }
    let mut pref_sum = 0.0;
    for &e in exemplars {
        pref_sum += state.s.get(e, e);
    }
    Ok(assign_sum + pref_sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points_1d(vals: &[f64]) -> DenseMatrix {
        DenseMatrix::from_vec(vals.len(), 1, vals.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn similarity_fixture_and_median_preference() {
        let x = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let state = similarity_matrix(&x, &ApParams::default()).unwrap();
        assert!(close(state.s.get(0, 3), -121.0, 1e-9));
        assert!(close(state.preference, -90.5, 1e-12));
        for k in 0..4 {
            assert_eq!(state.s.get(k, k), -90.5);
        }
        assert!(state.r.values().iter().all(|&v| v == 0.0));
        assert!(state.a.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identical_points_have_zero_similarity() {
        let x = points_1d(&[2.0, 2.0]);
        let state = similarity_matrix(&x, &ApParams::default()).unwrap();
        assert!(state.s.get(0, 1).abs() <= 1e-9);
        assert!(state.s.get(1, 0).abs() <= 1e-9);
    }

    #[test]
    fn scalar_preference_fills_diagonal() {
        let x = points_1d(&[0.0, 1.0, 2.0]);
        let params = ApParams {
            preference: PreferencePolicy::Scalar(-50.0),
            ..ApParams::default()
        };
        let state = similarity_matrix(&x, &params).unwrap();
        for k in 0..3 {
            assert_eq!(state.s.get(k, k), -50.0);
        }
    }

    #[test]
    fn single_point_is_error() {
        let x = points_1d(&[1.0]);
        assert!(similarity_matrix(&x, &ApParams::default()).is_err());
    }

    #[test]
    fn first_responsibility_sweep_with_zero_availability() {
        let x = points_1d(&[0.0, 1.0, 10.0]);
        let params = ApParams {
            perturb: false,
            ..ApParams::default()
        };
        let mut state = similarity_matrix(&x, &params).unwrap();
        // damping 0 makes the sweep produce the raw candidate values
        update_responsibilities(&mut state, 0.0);
        let n = 3;
        for i in 0..n {
            for k in 0..n {
                let mut max_other = f64::NEG_INFINITY;
                for kp in 0..n {
                    if kp != k {
                        max_other = max_other.max(state.s.get(i, kp));
                    }
                }
                let expect = state.s.get(i, k) - max_other;
                assert!(close(state.r.get(i, k), expect, 1e-12), "({i},{k})");
            }
        }
    }

    #[test]
    fn damping_one_is_identity() {
        let x = points_1d(&[0.0, 3.0, 7.0, 20.0]);
        let mut state = similarity_matrix(&x, &ApParams::default()).unwrap();
        // push the state somewhere non-trivial first
        update_responsibilities(&mut state, 0.7);
        update_availabilities(&mut state, 0.7);
        let r_before = state.r.values().to_vec();
        let a_before = state.a.values().to_vec();
        update_responsibilities(&mut state, 1.0);
        update_availabilities(&mut state, 1.0);
        assert_eq!(state.r.values(), &r_before[..]);
        assert_eq!(state.a.values(), &a_before[..]);
    }

    #[test]
    fn availabilities_with_no_positive_evidence() {
        // all r <= 0 off-diagonal and r(k,k) <= 0 means a_hat(i,k) = r(k,k)
        let x = points_1d(&[0.0, 5.0, 9.0]);
        let mut state = similarity_matrix(&x, &ApParams::default()).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                state.r.set(i, k, -(1.0 + i as f64 + 3.0 * k as f64));
            }
        }
        update_availabilities(&mut state, 0.0);
        for i in 0..3 {
            for k in 0..3 {
                if i != k {
                    assert_eq!(state.a.get(i, k), state.r.get(k, k), "({i},{k})");
                } else {
                    assert_eq!(state.a.get(k, k), 0.0);
                }
            }
        }
    }

    #[test]
    fn fixture_converges_to_two_pairs() {
        let x = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let a = ap_fit(&x, &ApParams::default()).unwrap();
        assert_eq!(a.k, 2);
        assert!(a.converged);
        assert_eq!(a.labels[0], a.labels[1]);
        assert_eq!(a.labels[2], a.labels[3]);
        assert_ne!(a.labels[0], a.labels[2]);
        assert!(
            (a.net_similarity.unwrap() - (-183.0)).abs() < 1e-6,
            "net {}",
            a.net_similarity.unwrap()
        );
        // exemplars label themselves
        for (c, &e) in a.exemplars.as_ref().unwrap().iter().enumerate() {
            assert_eq!(a.labels[e], c);
        }
    }

    #[test]
    fn high_preference_makes_singletons() {
        let x = points_1d(&[0.0, 4.0]);
        let params = ApParams {
            preference: PreferencePolicy::Scalar(1.0),
            ..ApParams::default()
        };
        let a = ap_fit(&x, &params).unwrap();
        assert_eq!(a.k, 2);
        assert_eq!(a.labels, vec![0, 1]);
    }

    #[test]
    fn net_similarity_fixture_values() {
        let x = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let params = ApParams {
            perturb: false,
            ..ApParams::default()
        };
        let state = similarity_matrix(&x, &params).unwrap();
        // single exemplar 0 for everything
        let ns = net_similarity(&[0, 0, 0, 0], &[0], &state).unwrap();
        assert!(close(ns, -312.5, 1e-12), "{ns}");
        // all points exemplars: n * p
        let ns_all = net_similarity(&[0, 1, 2, 3], &[0, 1, 2, 3], &state).unwrap();
        assert!(close(ns_all, 4.0 * -90.5, 1e-12));
        // optimum
        let ns_opt = net_similarity(&[0, 0, 1, 1], &[0, 2], &state).unwrap();
        assert!(close(ns_opt, -183.0, 1e-12), "{ns_opt}");
    }

    #[test]
    fn net_similarity_rejects_inconsistent_labels() {
        let x = points_1d(&[0.0, 1.0, 10.0, 11.0]);
        let state = similarity_matrix(&x, &ApParams::default()).unwrap();
        // exemplar 0 not labeled to its own cluster
        assert!(net_similarity(&[1, 0, 0, 0], &[0, 1], &state).is_err());
        // label out of range
        assert!(net_similarity(&[0, 0, 5, 0], &[0], &state).is_err());
    }

    #[test]
    fn messages_stay_finite_under_damping() {
        let mut rng = SeededRng::new(60);
        let vals: Vec<f64> = (0..50 * 3).map(|_| rng.next_f64() * 8.0).collect();
        let x = DenseMatrix::from_vec(50, 3, vals).unwrap();
        let params = ApParams {
            max_iter: 120,
            ..ApParams::default()
        };
        let mut state = similarity_matrix(&x, &params).unwrap();
        for _ in 0..120 {
            update_responsibilities(&mut state, params.damping);
            update_availabilities(&mut state, params.damping);
        }
        assert!(state.r.is_finite());
        assert!(state.a.is_finite());
    }
}
