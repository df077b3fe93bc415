use std::collections::{BTreeMap, BTreeSet};

use crate::linalg;
use crate::mesh::Triangulation;
use crate::Scalar;

/// Sorted pairwise squared distances divided by the smallest one, in units of
/// `1e-9` (rounded). Equal keys mean similar simplices.
pub type SimilarityKey = Vec<i64>;

pub fn similarity_key<T: Scalar>(s: &[Vec<T>]) -> SimilarityKey {
    let mut d2: Vec<f64> = Vec::with_capacity(s.len() * (s.len() - 1) / 2);
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let d = linalg::dist(&s[i], &s[j]).to_f64().unwrap_or(f64::NAN);
            d2.push(d * d);
        }
    }
    let min = d2.iter().copied().fold(f64::INFINITY, f64::min);
    let mut key: Vec<i64> = d2.iter().map(|&x| (x / min * 1e9).round() as i64).collect();
    key.sort_unstable();
    key
}

/// Number of distinct similarity keys among live simplices, per initial ancestor.
pub fn similarity_classes<T: Scalar>(tria: &Triangulation<T>) -> BTreeMap<u32, usize> {
    let mut sets: BTreeMap<u32, BTreeSet<SimilarityKey>> = BTreeMap::new();
    for id in tria.live_ids() {
        let key = similarity_key(&tria.simplex_coords(id));
        sets.entry(tria.simplex(id).ancestor())
            .or_default()
            .insert(key);
    }
    sets.into_iter().map(|(a, s)| (a, s.len())).collect()
}
