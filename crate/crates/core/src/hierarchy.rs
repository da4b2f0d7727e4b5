//! Agglomerative hierarchical clustering and the AP-to-AHC hybrid.

use std::time::Instant;

use serde::Serialize;

use crate::affinity::{ap_fit, ApParams};
use crate::assignment::{Algorithm, Assignment};
use crate::error::{Error, Result};
use crate::numerics::{pairwise_sq_distances, DenseMatrix};

/// Inter-cluster distance rule over squared Euclidean point distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Unweighted mean of all cross-pair distances.
    Average,
    Complete,
    Single,
}

impl Linkage {
    pub fn from_slug(s: &str) -> Option<Self> {
        match s {
            "average" => Some(Linkage::Average),
            "complete" => Some(Linkage::Complete),
            "single" => Some(Linkage::Single),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AhcParams {
    pub linkage: Linkage,
    pub target_k: usize,
}

impl Default for AhcParams {
    fn default() -> Self {
        Self {
            linkage: Linkage::Average,
            target_k: 3,
        }
    }
}

/// One merge of the dendrogram. Original points carry ids `0..n`; the
/// cluster created by merge step `t` gets id `n + t`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MergeStep {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub new_id: usize,
    pub size: usize,
}

/// Renders the merge list as CSV (`step,left,right,distance,size`) for
/// external dendrogram tooling.
pub fn merge_steps_csv(steps: &[MergeStep]) -> String {
    let mut out = String::from("step,left,right,distance,size\n");
    for (i, s) in steps.iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{}\n", i, s.left, s.right, s.distance, s.size));
    }
    out
}

struct ActiveCluster {
    id: usize,
    size: usize,
    members: Vec<usize>,
}

/// Agglomerates singletons until `target_k` clusters remain. Returns the
/// merge list and final labels, numbered `0..target_k` by smallest member
/// index. Tied merge distances resolve to the lexicographically lowest
/// `(left id, right id)` pair.
pub fn ahc_fit(points: &DenseMatrix, params: &AhcParams) -> Result<(Vec<MergeStep>, Vec<usize>)> {
    let n = points.rows();
    if params.target_k == 0 {
        return Err(Error::Parameter("target_k must be at least 1".into()));
    }
    if n < params.target_k {
        return Err(Error::Parameter(format!(
            "hierarchical clustering needs at least target_k={} rows, got {n}",
            params.target_k
        )));
    }

    let mut dist = pairwise_sq_distances(points)?;
    let mut slots: Vec<Option<ActiveCluster>> = (0..n)
        .map(|i| {
            Some(ActiveCluster {
                id: i,
                size: 1,
                members: vec![i],
            })
        })
        .collect();
    let mut active = n;
    let mut steps = Vec::with_capacity(n.saturating_sub(params.target_k));

    while active > params.target_k {
        // global argmin over active slot pairs; ties resolved by cluster ids
        let mut best: Option<(f64, usize, usize, usize, usize)> = None; // (d, id_lo, id_hi, slot_i, slot_j)
        for i in 0..n {
            let Some(ci) = slots[i].as_ref() else { continue };
            for j in (i + 1)..n {
                let Some(cj) = slots[j].as_ref() else { continue };
                let d = dist.get(i, j);
                let (id_lo, id_hi) = if ci.id < cj.id { (ci.id, cj.id) } else { (cj.id, ci.id) };
                let candidate = (d, id_lo, id_hi, i, j);
                best = Some(match best {
                    None => candidate,
                    Some(cur) => {
                        if d < cur.0 || (d == cur.0 && (id_lo, id_hi) < (cur.1, cur.2)) {
                            candidate
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        let (d, id_lo, id_hi, si, sj) = best.expect("at least two active clusters");

        let cj = slots[sj].take().expect("slot j active");
        let ci = slots[si].as_mut().expect("slot i active");
        let (size_i, size_j) = (ci.size, cj.size);
        let new_size = size_i + size_j;
        let new_id = n + steps.len();
        steps.push(MergeStep {
            left: id_lo,
            right: id_hi,
            distance: d,
            new_id,
            size: new_size,
        });
        ci.id = new_id;
        ci.size = new_size;
        ci.members.extend(cj.members);

        // Lance-Williams update of the merged cluster's distances
        for t in 0..n {
            if t == si || slots[t].is_none() {
                continue;
            }
            let dit = dist.get(si, t);
            let djt = dist.get(sj, t);
            let merged = match params.linkage {
                Linkage::Average => {
                    (size_i as f64 * dit + size_j as f64 * djt) / new_size as f64
                }
                Linkage::Complete => dit.max(djt),
                Linkage::Single => dit.min(djt),
            };
            dist.set(si, t, merged);
            dist.set(t, si, merged);
        }
        active -= 1;
    }

    // number final clusters by smallest member index
    let mut finals: Vec<&ActiveCluster> = slots.iter().flatten().collect();
    finals.sort_by_key(|c| *c.members.iter().min().expect("non-empty cluster"));
    let mut labels = vec![0usize; n];
    for (label, cluster) in finals.iter().enumerate() {
        for &m in &cluster.members {
            labels[m] = label;
        }
    }
    Ok((steps, labels))
}

/// The hybrid pipeline: affinity propagation selects exemplars, then AHC
/// merges the exemplar vectors down to `target_k` super-clusters and every
/// document inherits its exemplar's super-cluster.
///
/// If AP yields fewer than `target_k` exemplars, the AP labels are
/// returned as-is with a warning.
pub fn ap_ahc_pipeline(
    x: &DenseMatrix,
    ap_params: &ApParams,
    ahc_params: &AhcParams,
) -> Result<Assignment> {
    if x.rows() < ahc_params.target_k {
        return Err(Error::Parameter(format!(
            "hybrid pipeline needs at least target_k={} rows, got {}",
            ahc_params.target_k,
            x.rows()
        )));
    }
    let start = Instant::now();
    let ap = ap_fit(x, ap_params)?;
    let exemplars = ap.exemplars.clone().expect("ap_fit always reports exemplars");

    if exemplars.len() < ahc_params.target_k {
        return Ok(Assignment {
            algorithm: Algorithm::ApAhc,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            warning: Some(format!(
                "affinity propagation produced {} exemplars, below target_k={}; returning AP labels unrefined",
                exemplars.len(),
                ahc_params.target_k
            )),
            ..ap
        });
    }

    let exemplar_rows = x.select_rows(&exemplars);
    let (_, super_labels) = ahc_fit(&exemplar_rows, ahc_params)?;
    let labels: Vec<usize> = ap.labels.iter().map(|&c| super_labels[c]).collect();

    Ok(Assignment {
        labels,
        k: ahc_params.target_k,
        exemplars: Some(exemplars),
        iterations: ap.iterations,
        converged: ap.converged,
        inertia: None,
        net_similarity: None,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        algorithm: Algorithm::ApAhc,
        seed: ap_params.seed,
        warning: None,
    })
}
