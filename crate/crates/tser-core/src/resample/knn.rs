//! Exact k-nearest-neighbor queries by Euclidean distance.

use alloc::vec::Vec;

use crate::{Error, Result};

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Indices of the `k` points nearest to `query`, ordered by distance.
///
/// Candidates are all of `points`, or the subset named by `restrict`.
/// `exclude` removes the query's own index when it is a member of the
/// candidate set. Ties break toward the lower index; when fewer than `k`
/// candidates exist, all of them are returned.
pub fn k_nearest(
    points: &[Vec<f64>],
    query: &[f64],
    k: usize,
    restrict: Option<&[usize]>,
    exclude: Option<usize>,
) -> Result<Vec<usize>> {
    let mut ranked: Vec<(f64, usize)> = Vec::new();
    let mut visit = |index: usize| -> Result<()> {
        if Some(index) == exclude {
            return Ok(());
        }
        let point = &points[index];
        if point.len() != query.len() {
            return Err(Error::DimensionMismatch {
                expected: query.len(),
                got: point.len(),
            });
        }
        ranked.push((squared_distance(point, query), index));
        Ok(())
    };
    match restrict {
        Some(subset) => subset.iter().try_for_each(|&i| visit(i))?,
        None => (0..points.len()).try_for_each(&mut visit)?,
    }
    ranked.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    ranked.truncate(k);
    Ok(ranked.into_iter().map(|(_, i)| i).collect())
}
