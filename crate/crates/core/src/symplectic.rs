//! Completion of the gluing rows to an integer symplectic matrix.
//!
//! The form is `ω(u, v) = u_A · v_B - u_B · v_A` on `Z^(2K)` split into halves
//! `(A | B)`, so a `2K × 2K` matrix `G` satisfies `G^t J G = J` exactly when its
//! rows `q_1..q_K, p_1..p_K` obey `ω(q_i, q_j) = ω(p_i, p_j) = 0` and
//! `ω(q_i, p_j) = δ_ij`. The rows `q_i = (A_i | B_i)` and `p_1 = (C | D)` are
//! given; `p_2..p_K` are found by solving the linear pairing constraints over
//! the integers (Smith normal form) and then made mutually isotropic by adding
//! multiples of the `q_i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gluing::GluingData;

pub type IntMatrix = Vec<Vec<i64>>;

/// A symplectic completion `G` of the gluing rows and its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticFrame {
    pub k: usize,
    pub g: IntMatrix,
    pub g_inv: IntMatrix,
}

impl SymplecticFrame {
    /// Wraps a full matrix after checking that it is symplectic.
    pub fn from_matrix(g: IntMatrix) -> Result<Self> {
        let n = g.len();
        if n == 0 || !n.is_multiple_of(2) || g.iter().any(|r| r.len() != n) {
            return Err(Error::schema("frame", "expected a square matrix of even size"));
        }
        if !verify(&g) {
            return Err(Error::NotExtendable("supplied frame does not satisfy G^t J G = J".into()));
        }
        let g_inv = symplectic_inverse(&g);
        Ok(SymplecticFrame { k: n / 2, g, g_inv })
    }

    /// Checks that the first `K + 1` rows are the gluing rows of `data`.
    pub fn extends(&self, data: &GluingData) -> bool {
        self.k == data.k && (0..=data.k).all(|i| self.g[i] == data.row(i))
    }

    pub fn inverse(&self) -> &IntMatrix {
        &self.g_inv
    }
}

pub fn omega(u: &[i64], v: &[i64]) -> i64 {
    let k = u.len() / 2;
    (0..k).map(|i| u[i] * v[k + i] - u[k + i] * v[i]).sum()
}

/// `J = [[0, I], [-I, 0]]` of size `2k`.
pub fn standard_form(k: usize) -> IntMatrix {
    let mut j = vec![vec![0; 2 * k]; 2 * k];
    for i in 0..k {
        j[i][k + i] = 1;
        j[k + i][i] = -1;
    }
    j
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn matmul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// True iff `G^t J G = J` exactly.
pub fn verify(g: &IntMatrix) -> bool {
    let n = g.len();
    if n == 0 || !n.is_multiple_of(2) || g.iter().any(|r| r.len() != n) {
        return false;
    }
    let j = standard_form(n / 2);
    matmul(&matmul(&transpose(g), &j), g) == j
}

/// `G^-1 = -J G^t J`, valid for symplectic `G`.
pub fn symplectic_inverse(g: &IntMatrix) -> IntMatrix {
    let j = standard_form(g.len() / 2);
    matmul(&matmul(&j, &transpose(g)), &j)
        .into_iter()
        .map(|row| row.into_iter().map(|x| -x).collect())
        .collect()
}

/// Completes the `K + 1` gluing rows to a symplectic frame.
pub fn complete(data: &GluingData) -> Result<SymplecticFrame> {
    let k = data.k;
    let rows: Vec<Vec<i64>> = (0..=k).map(|i| data.row(i)).collect();
    let p1 = &rows[k];

    for i in 0..k {
        for j in i + 1..k {
            let w = omega(&rows[i], &rows[j]);
            if w != 0 {
                return Err(Error::NotExtendable(format!(
                    "<row {}, row {}> = {w}, expected 0",
                    i + 1,
                    j + 1
                )));
            }
        }
        let w = omega(&rows[i], p1);
        let want = i64::from(i == 0);
        if w != want {
            return Err(Error::NotExtendable(format!(
                "<row {}, row {}> = {w}, expected {want}",
                i + 1,
                k + 1
            )));
        }
    }

    // Linear constraints on a new row p: ω(q_i, p) = δ_ij and ω(p_1, p) = 0.
    // ω(u, p) = (-u_B | u_A) · p.
    let system: IntMatrix = rows
        .iter()
        .map(|u| u[k..].iter().map(|x| -x).chain(u[..k].iter().copied()).collect())
        .collect();
    let smith = SmithForm::new(&system);

    let mut duals: Vec<Vec<i64>> = Vec::with_capacity(k - 1);
    for j in 1..k {
        let mut rhs = vec![0i64; k + 1];
        rhs[j] = 1;
        let mut p = smith.solve(&rhs).ok_or_else(|| {
            Error::NotExtendable(format!("no integer row pairing to 1 with row {} exists", j + 1))
        })?;
        for (idx, prev) in duals.iter().enumerate() {
            // Fix ω(p_prev, p) = 0 by adding a multiple of q_(idx+2).
            let w = omega(prev, &p);
            let q = &rows[idx + 1];
            for (x, y) in p.iter_mut().zip(q) {
                *x += w * y;
            }
        }
        duals.push(p);
    }

    let mut g = rows;
    g.extend(duals);
    if !verify(&g) {
        return Err(Error::NotExtendable("completed matrix failed the symplectic check".into()));
    }
    let g_inv = symplectic_inverse(&g);
    Ok(SymplecticFrame { k, g, g_inv })
}

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal, each diagonal
/// entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: Vec<Vec<i128>>,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub rank: usize,
}

impl SmithForm {
    pub fn new(m: &IntMatrix) -> Self {
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut s: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut u = unit(rows);
        let mut v = unit(cols);
        let mut t = 0;
        while t < rows.min(cols) {
            let Some((pi, pj)) = min_abs_entry(&s, t) else { break };
            s.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut s, t, pj);
            swap_cols(&mut v, t, pj);
            loop {
                let pivot = s[t][t];
                let mut clean = true;
                for i in t + 1..rows {
                    let q = s[i][t].div_euclid(pivot);
                    if q != 0 {
                        add_row(&mut s, i, t, -q);
                        add_row(&mut u, i, t, -q);
                    }
                    clean &= s[i][t] == 0;
                }
                for j in t + 1..cols {
                    let q = s[t][j].div_euclid(pivot);
                    if q != 0 {
                        add_col(&mut s, j, t, -q);
                        add_col(&mut v, j, t, -q);
                    }
                    clean &= s[t][j] == 0;
                }
                if clean {
                    // Divisibility: fold any offending row into the pivot row.
                    let bad = (t + 1..rows)
                        .find(|&i| (t + 1..cols).any(|j| s[i][j] % pivot != 0));
                    match bad {
                        None => break,
                        Some(i) => {
                            add_row(&mut s, t, i, 1);
                            add_row(&mut u, t, i, 1);
                            continue;
                        }
                    }
                }
                // Move the smallest remaining entry of row/column t to the pivot.
                let (mut bi, mut bj) = (t, t);
                for i in t..rows {
                    if s[i][t] != 0 && s[i][t].abs() < s[bi][bj].abs() {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t..cols {
                    if s[t][j] != 0 && s[t][j].abs() < s[bi][bj].abs() {
                        (bi, bj) = (t, j);
                    }
                }
                s.swap(t, bi);
                u.swap(t, bi);
                swap_cols(&mut s, t, bj);
                swap_cols(&mut v, t, bj);
            }
            if s[t][t] < 0 {
                for x in s[t].iter_mut() {
                    *x = -*x;
                }
                for x in u[t].iter_mut() {
                    *x = -*x;
                }
            }
            t += 1;
        }
        SmithForm { s, u, v, rank: t }
    }

    /// An integer solution of `M p = rhs`, if one exists.
    pub fn solve(&self, rhs: &[i64]) -> Option<Vec<i64>> {
        let cols = self.v.len();
        let c: Vec<i128> = self
            .u
            .iter()
            .map(|row| row.iter().zip(rhs).map(|(a, &b)| a * b as i128).sum())
            .collect();
        let mut z = vec![0i128; cols];
        for (i, ci) in c.iter().enumerate() {
            if i < self.rank {
                let d = self.s[i][i];
                if ci % d != 0 {
                    return None;
                }
                z[i] = ci / d;
            } else if *ci != 0 {
                return None;
            }
        }
        self.v
            .iter()
            .map(|row| i64::try_from(row.iter().zip(&z).map(|(a, b)| a * b).sum::<i128>()).ok())
            .collect()
    }
}

fn unit(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn min_abs_entry(s: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in s.iter().enumerate().skip(t) {
        for (j, &x) in row.iter().enumerate().skip(t) {
            if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < s[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// `row[dst] += k * row[src]`
fn add_row(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    let src_row = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(src_row) {
        *x += k * y;
    }
}

/// `col[dst] += k * col[src]`
fn add_col(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    for row in m.iter_mut() {
        row[dst] += k * row[src];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn paper_frame() -> IntMatrix {
        vec![
            vec![1, 1, 0, 1],
            vec![-1, -1, 1, -2],
            vec![0, 1, 0, 2],
            vec![-1, 0, 0, 0],
        ]
    }

    fn figure_eight() -> GluingData {
        GluingData {
            name: "4_1".into(),
            k: 2,
            a: vec![vec![1, 1], vec![-1, -1]],
            b: vec![vec![0, 1], vec![1, -2]],
            c: vec![0, 1],
            d: vec![0, 2],
            nu: vec![1, -1],
            two_nu_last: 2,
        }
    }

    #[test]
    fn verify_examples() {
        assert!(verify(&identity(4)));
        assert!(verify(&paper_frame()));
        let mut bad = paper_frame();
        bad[3][1] += 1;
        assert!(!verify(&bad));
        assert!(!verify(&vec![vec![1, 0, 0]; 3]));
    }

    #[test]
    fn inverse_of_paper_frame() {
        let g = paper_frame();
        let inv = symplectic_inverse(&g);
        assert_eq!(matmul(&g, &inv), identity(4));
        assert_eq!(symplectic_inverse(&identity(4)), identity(4));
    }

    #[test]
    fn completes_figure_eight() {
        let data = figure_eight();
        let frame = complete(&data).unwrap();
        assert!(verify(&frame.g));
        assert!(frame.extends(&data));
        assert_eq!(matmul(&frame.g_inv, &frame.g), identity(4));
        let paper = SymplecticFrame::from_matrix(paper_frame()).unwrap();
        assert!(paper.extends(&data));
    }

    #[test]
    fn k_one_identity() {
        let data = GluingData {
            name: "unit".into(),
            k: 1,
            a: vec![vec![1]],
            b: vec![vec![0]],
            c: vec![0],
            d: vec![1],
            nu: vec![0],
            two_nu_last: 0,
        };
        assert_eq!(complete(&data).unwrap().g, identity(2));
    }

    #[test]
    fn reports_failing_pairing() {
        let mut data = figure_eight();
        data.d = vec![0, 1];
        match complete(&data) {
            Err(Error::NotExtendable(msg)) => assert!(msg.contains("row 1, row 3"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn smith_form_is_diagonal_and_unimodular_product() {
        let m: IntMatrix = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let sf = SmithForm::new(&m);
        let m128: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mul = |a: &Vec<Vec<i128>>, b: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
            a.iter()
                .map(|r| (0..b[0].len()).map(|j| r.iter().zip(b).map(|(x, br)| x * br[j]).sum()).collect())
                .collect()
        };
        assert_eq!(mul(&mul(&sf.u, &m128), &sf.v), sf.s);
        let diag: Vec<i128> = (0..3).map(|i| sf.s[i][i]).collect();
        assert_eq!(diag, vec![2, 6, 12]);
    }
}
