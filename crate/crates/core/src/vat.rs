//! Visual assessment of clustering tendency: reorder a dissimilarity matrix
//! along a minimum spanning tree so clusters show up as dark diagonal blocks.

use std::path::Path;

use crate::dissimilarity::DissimilarityMatrix;
use crate::error::{Error, Result};
use crate::io::write_atomic;

/// Prim-order traversal starting from a row that holds the largest entry.
/// Ties go to the lowest index.
pub fn vat_order(d: &DissimilarityMatrix) -> Vec<usize> {
    let n = d.len();
    if n == 0 {
        return Vec::new();
    }
    let mut start = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) > best {
                best = d.get(i, j);
                start = i;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut selected = vec![false; n];
    // distance from each unselected object to the selected set
    let mut link = vec![f64::INFINITY; n];
    let mut next = start;
    for _ in 0..n {
        selected[next] = true;
        order.push(next);
        for j in 0..n {
            if !selected[j] {
                link[j] = link[j].min(d.get(next, j));
            }
        }
        let mut cand = usize::MAX;
        for j in 0..n {
            if !selected[j] && (cand == usize::MAX || link[j] < link[cand]) {
                cand = j;
            }
        }
        next = cand;
    }
    order
}

/// Grey levels of the ordered image: 255·(1 − d/max), similar pairs dark.
/// A zero matrix is scaled by 1, giving a uniform white image.
pub fn idm_pixels(d: &DissimilarityMatrix, order: &[usize]) -> Result<Vec<u8>> {
    let n = d.len();
    let mut seen = vec![false; n];
    if order.len() != n
        || order
            .iter()
            .any(|&i| i >= n || std::mem::replace(&mut seen[i], true))
    {
        return Err(Error::invalid(
            "order is not a permutation of the matrix rows",
        ));
    }
    let max = d.max();
    let scale = if max > 0.0 { max } else { 1.0 };
    let mut px = Vec::with_capacity(n * n);
    for &i in order {
        for &j in order {
            let v = 255.0 * (1.0 - d.get(i, j) / scale);
            px.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    Ok(px)
}

/// Writes the ordered dissimilarity image as binary PGM (P5, maxval 255).
pub fn render_idm(d: &DissimilarityMatrix, order: &[usize], path: &Path) -> Result<()> {
    let px = idm_pixels(d, order)?;
    let n = d.len();
    let mut bytes = format!("P5\n{n} {n}\n255\n").into_bytes();
    bytes.extend_from_slice(&px);
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> DissimilarityMatrix {
        DissimilarityMatrix::from_rows(&[
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 4.0],
            vec![5.0, 4.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn hand_traced_order() {
        assert_eq!(vat_order(&three()), vec![0, 1, 2]);
        let two = DissimilarityMatrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        assert_eq!(vat_order(&two), vec![0, 1]);
    }

    #[test]
    fn pixels_match_formula() {
        // 255*(1-1/5)=204, 255*(1-4/5)=51, 255*(1-5/5)=0
        let px = idm_pixels(&three(), &[0, 1, 2]).unwrap();
        assert_eq!(px, vec![255, 204, 0, 204, 255, 51, 0, 51, 255]);
    }

    #[test]
    fn zero_matrix_is_uniform() {
        let z = DissimilarityMatrix::from_rows(&vec![vec![0.0; 4]; 4]).unwrap();
        let px = idm_pixels(&z, &vat_order(&z)).unwrap();
        assert!(px.iter().all(|&p| p == 255));
    }

    #[test]
    fn pgm_header_and_bad_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("idm.pgm");
        render_idm(&three(), &[0, 1, 2], &p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P5\n3 3\n255\n"));
        assert_eq!(bytes.len(), 11 + 9);
        assert!(idm_pixels(&three(), &[0, 0, 1]).is_err());
    }
}
