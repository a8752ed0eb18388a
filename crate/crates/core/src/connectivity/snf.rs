//! Smith normal form over the integers with optional unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![BigInt::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

pub fn mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    let mut out = zeros(a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..cols {
                if !b[k][j].is_zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mul_vec(a: &Matrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(x).filter(|(r, _)| !r.is_zero()).map(|(r, v)| r * v).sum())
        .collect()
}

/// `U · A · V = D` with `D` diagonal, each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Non-zero diagonal entries, all positive.
    pub diagonal: Vec<BigInt>,
    pub u: Option<Matrix>,
    pub u_inv: Option<Matrix>,
    pub v: Option<Matrix>,
    pub v_inv: Option<Matrix>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diagonal.len()
    }

    /// Diagonal entries larger than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

struct Work {
    a: Matrix,
    rows: usize,
    cols: usize,
    u: Option<Matrix>,
    u_inv: Option<Matrix>,
    v: Option<Matrix>,
    v_inv: Option<Matrix>,
}

impl Work {
    // row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            if !self.a[t][j].is_zero() {
                let d = q * &self.a[t][j];
                self.a[i][j] -= d;
            }
        }
        if let Some(u) = &mut self.u {
            for j in 0..self.rows {
                if !u[t][j].is_zero() {
                    let d = q * &u[t][j];
                    u[i][j] -= d;
                }
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for row in ui.iter_mut() {
                if !row[i].is_zero() {
                    let d = q * &row[i];
                    row[t] += d;
                }
            }
        }
    }

    // col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            if !row[t].is_zero() {
                let d = q * &row[t];
                row[j] -= d;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                if !row[t].is_zero() {
                    let d = q * &row[t];
                    row[j] -= d;
                }
            }
        }
        if let Some(vi) = &mut self.v_inv {
            for k in 0..self.cols {
                if !vi[j][k].is_zero() {
                    let d = q * &vi[j][k];
                    vi[t][k] += d;
                }
            }
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
        if let Some(ui) = &mut self.u_inv {
            for row in ui.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap(i, j);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in u[i].iter_mut() {
                *x = -&*x;
            }
        }
        if let Some(ui) = &mut self.u_inv {
            for row in ui.iter_mut() {
                row[i] = -&row[i];
            }
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }
}

/// Smith normal form of a `rows × cols` matrix. Transforms are tracked only if asked for.
pub fn smith(a: &Matrix, rows: usize, cols: usize, transforms: bool) -> Snf {
    let mut w = Work {
        a: a.clone(),
        rows,
        cols,
        u: transforms.then(|| identity(rows)),
        u_inv: transforms.then(|| identity(rows)),
        v: transforms.then(|| identity(cols)),
        v_inv: transforms.then(|| identity(cols)),
    };
    let mut diagonal = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = w.min_entry(t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut again = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.row_sub(i, t, &q);
                if !w.a[i][t].is_zero() {
                    again = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.col_sub(j, t, &q);
                if !w.a[t][j].is_zero() {
                    again = true;
                }
            }
            if again {
                // A smaller remainder appeared in row or column t; move it to the pivot.
                let mut best = (t, t);
                for i in t..rows {
                    if !w.a[i][t].is_zero() && w.a[i][t].abs() < w.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..cols {
                    if !w.a[t][j].is_zero() && w.a[t][j].abs() < w.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            let p = w.a[t][t].clone();
            let bad = (t + 1..rows).find(|i| w.a[*i][t + 1..].iter().any(|x| !x.is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    // Bring the offending row up; the next pass shrinks the pivot.
                    w.row_sub(t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        diagonal.push(w.a[t][t].clone());
        t += 1;
    }
    Snf { diagonal, u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv }
}

pub fn rank(a: &Matrix, rows: usize, cols: usize) -> usize {
    smith(a, rows, cols, false).rank()
}
