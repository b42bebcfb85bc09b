//! Small dense linear algebra over exact integers and f64.
//!
//! Everything here is sized for circuit supports (n ≤ 6): determinants are
//! computed fraction-free over checked 128-bit integers, linear systems with
//! an integer matrix are solved by Bareiss elimination with the float
//! right-hand side carried along, and integer congruences are enumerated via
//! the Smith normal form.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("integer overflow during exact determinant computation")]
    Overflow,
    #[error("matrix is singular")]
    Singular,
    #[error("determinant {0} does not fit in 64 bits")]
    DeterminantTooLarge(i128),
}

/// Exact determinant by fraction-free (Bareiss) elimination over i128.
pub fn det_bareiss(m: &[Vec<i64>]) -> Result<i64, LinalgError> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        // Largest-magnitude pivot keeps intermediates small.
        let pivot_row = (k..n).max_by_key(|&i| a[i][k].abs());
        let pivot_row = pivot_row.ok_or(LinalgError::Singular)?;
        if a[pivot_row][k] == 0 {
            return Ok(0);
        }
        if pivot_row != k {
            a.swap(pivot_row, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t1 = a[k][k].checked_mul(a[i][j]).ok_or(LinalgError::Overflow)?;
                let t2 = a[i][k].checked_mul(a[k][j]).ok_or(LinalgError::Overflow)?;
                let num = t1.checked_sub(t2).ok_or(LinalgError::Overflow)?;
                a[i][j] = num / prev; // exact by Bareiss' identity
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    let det = sign * a[n - 1][n - 1];
    i64::try_from(det).map_err(|_| LinalgError::DeterminantTooLarge(det))
}

/// Determinant by cofactor expansion. Exponentially slower than Bareiss;
/// kept as the independent cross-check route for the exactness tests.
#[allow(dead_code)]
pub fn det_cofactor(m: &[Vec<i64>]) -> Result<i64, LinalgError> {
    fn go(m: &[Vec<i128>]) -> Result<i128, LinalgError> {
        let n = m.len();
        if n == 1 {
            return Ok(m[0][0]);
        }
        let mut acc: i128 = 0;
        for (j, &top) in m[0].iter().enumerate() {
            if top == 0 {
                continue;
            }
            let minor: Vec<Vec<i128>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter_map(|(k, &v)| (k != j).then_some(v))
                        .collect()
                })
                .collect();
            let sub = go(&minor)?;
            let term = top.checked_mul(sub).ok_or(LinalgError::Overflow)?;
            acc = if j % 2 == 0 {
                acc.checked_add(term).ok_or(LinalgError::Overflow)?
            } else {
                acc.checked_sub(term).ok_or(LinalgError::Overflow)?
            };
        }
        Ok(acc)
    }
    if m.is_empty() {
        return Ok(1);
    }
    let a: Vec<Vec<i128>> = m
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let det = go(&a)?;
    i64::try_from(det).map_err(|_| LinalgError::DeterminantTooLarge(det))
}

/// Solves A x = rhs where A is an exact integer matrix, by fraction-free
/// elimination: all pivots and multipliers stay integral, only the
/// right-hand side is carried in floating point.
pub fn solve_integer_system(a: &[Vec<i64>], rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.len();
    assert_eq!(rhs.len(), n);
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|row| row.iter().map(|&v| v as i128).collect())
        .collect();
    let mut b: Vec<f64> = rhs.to_vec();
    let mut prev = 1i128;
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by_key(|&i| m[i][k].abs())
            .ok_or(LinalgError::Singular)?;
        if m[pivot_row][k] == 0 {
            return Err(LinalgError::Singular);
        }
        if pivot_row != k {
            m.swap(pivot_row, k);
            b.swap(pivot_row, k);
        }
        for i in k + 1..n {
            let num_b = m[k][k] as f64 * b[i] - m[i][k] as f64 * b[k];
            for j in k + 1..n {
                let t1 = m[k][k].checked_mul(m[i][j]).ok_or(LinalgError::Overflow)?;
                let t2 = m[i][k].checked_mul(m[k][j]).ok_or(LinalgError::Overflow)?;
                m[i][j] = t1.checked_sub(t2).ok_or(LinalgError::Overflow)? / prev;
            }
            b[i] = num_b / prev as f64;
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= m[i][j] as f64 * x[j];
        }
        x[i] = s / m[i][i] as f64;
    }
    Ok(x)
}

/// Solves A x = rhs for a general f64 matrix with partial pivoting.
pub fn solve_f64(a: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
            .ok_or(LinalgError::Singular)?;
        if m[pivot_row][k].abs() < f64::MIN_POSITIVE {
            return Err(LinalgError::Singular);
        }
        m.swap(pivot_row, k);
        b.swap(pivot_row, k);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            let (pivot_rows, rest) = m.split_at_mut(k + 1);
            let pivot = &pivot_rows[k][k..];
            for (x, &p) in rest[i - k - 1][k..].iter_mut().zip(pivot) {
                *x -= f * p;
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Ok(x)
}

/// ∞-norm condition estimate ‖A‖∞·‖A⁻¹‖∞, with A⁻¹ built column by column.
/// Cheap at these sizes; used only to flag ill-conditioned supports.
pub fn condition_estimate(a: &[Vec<i64>]) -> f64 {
    let n = a.len();
    let norm_a = a
        .iter()
        .map(|r| r.iter().map(|&v| (v as f64).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut inv_rows = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        match solve_integer_system(a, &e) {
            Ok(col) => {
                for i in 0..n {
                    inv_rows[i][j] = col[i];
                }
            }
            Err(_) => return f64::INFINITY,
        }
    }
    let norm_inv = inv_rows
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    norm_a * norm_inv
}

/// (U, diagonal, V) of the Smith decomposition.
pub type SmithForm = (Vec<Vec<i64>>, Vec<i64>, Vec<Vec<i64>>);

/// Smith normal form: returns (u, s, v) with u·a·v = diag(s), u and v
/// unimodular, and `s[i]` ≥ 0 dividing `s[i+1]`.
pub fn smith_normal_form(a: &[Vec<i64>]) -> Result<SmithForm, LinalgError> {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = identity(n);
    let mut v: Vec<Vec<i128>> = identity(n);

    for t in 0..n {
        loop {
            // Pick the smallest nonzero entry of the trailing block as pivot.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if m[i][j] != 0
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) = match best {
                Some(p) => p,
                None => break, // trailing block all zero
            };
            swap_rows(&mut m, &mut u, t, pi);
            swap_cols(&mut m, &mut v, t, pj);
            let mut clean = true;
            for i in t + 1..n {
                let q = div_round(m[i][t], m[t][t]);
                if q != 0 {
                    row_axpy(&mut m, &mut u, i, t, -q)?;
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = div_round(m[t][j], m[t][t]);
                if q != 0 {
                    col_axpy(&mut m, &mut v, j, t, -q)?;
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if clean && (t + 1..n).all(|i| m[i][t] == 0) && (t + 1..n).all(|j| m[t][j] == 0) {
                break;
            }
        }
    }
    // Make diagonal non-negative and enforce divisibility s[t] | s[t+1].
    for t in 0..n {
        if m[t][t] < 0 {
            for j in 0..n {
                m[t][j] = -m[t][j];
                u[t][j] = -u[t][j];
            }
        }
    }
    for t in 0..n {
        for k in t + 1..n {
            while m[t][t] != 0 && m[k][k] % m[t][t] != 0 {
                // Standard divisibility fix-up: fold row k into row t and re-reduce.
                col_axpy(&mut m, &mut v, t, k, 1)?;
                reduce_pair(&mut m, &mut u, &mut v, t, k)?;
            }
        }
    }
    let s: Vec<i64> = (0..n)
        .map(|t| i64::try_from(m[t][t].abs()).map_err(|_| LinalgError::Overflow))
        .collect::<Result<_, _>>()?;
    let to64 = |m: Vec<Vec<i128>>| -> Result<Vec<Vec<i64>>, LinalgError> {
        m.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|v| i64::try_from(v).map_err(|_| LinalgError::Overflow))
                    .collect()
            })
            .collect()
    };
    Ok((to64(u)?, s, to64(v)?))
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

fn swap_rows(m: &mut [Vec<i128>], u: &mut [Vec<i128>], a: usize, b: usize) {
    if a != b {
        m.swap(a, b);
        u.swap(a, b);
    }
}

fn swap_cols(m: &mut [Vec<i128>], v: &mut [Vec<i128>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
        for row in v.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn row_axpy(m: &mut [Vec<i128>], u: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<(), LinalgError> {
    for j in 0..m[dst].len() {
        m[dst][j] = m[dst][j]
            .checked_add(q.checked_mul(m[src][j]).ok_or(LinalgError::Overflow)?)
            .ok_or(LinalgError::Overflow)?;
        u[dst][j] = u[dst][j]
            .checked_add(q.checked_mul(u[src][j]).ok_or(LinalgError::Overflow)?)
            .ok_or(LinalgError::Overflow)?;
    }
    Ok(())
}

fn col_axpy(m: &mut [Vec<i128>], v: &mut [Vec<i128>], dst: usize, src: usize, q: i128) -> Result<(), LinalgError> {
    for i in 0..m.len() {
        m[i][dst] = m[i][dst]
            .checked_add(q.checked_mul(m[i][src]).ok_or(LinalgError::Overflow)?)
            .ok_or(LinalgError::Overflow)?;
        v[i][dst] = v[i][dst]
            .checked_add(q.checked_mul(v[i][src]).ok_or(LinalgError::Overflow)?)
            .ok_or(LinalgError::Overflow)?;
    }
    Ok(())
}

/// Reduces the 2x2 principal submatrix at (t,t),(k,k) back to diagonal form
/// after a divisibility fix-up merge.
fn reduce_pair(
    m: &mut [Vec<i128>],
    u: &mut [Vec<i128>],
    v: &mut [Vec<i128>],
    t: usize,
    k: usize,
) -> Result<(), LinalgError> {
    loop {
        if m[k][t] == 0 && m[t][k] == 0 {
            if m[t][t] < 0 {
                for j in 0..m.len() {
                    m[t][j] = -m[t][j];
                    u[t][j] = -u[t][j];
                }
            }
            return Ok(());
        }
        if m[k][t] != 0 {
            if m[t][t] == 0 || (m[k][t].abs() < m[t][t].abs()) {
                swap_rows(m, u, t, k);
                continue;
            }
            let q = div_round(m[k][t], m[t][t]);
            row_axpy(m, u, k, t, -q)?;
            if m[k][t] != 0 {
                swap_rows(m, u, t, k);
            }
        }
        if m[t][k] != 0 {
            if m[t][t] == 0 || (m[t][k].abs() < m[t][t].abs()) {
                swap_cols(m, v, t, k);
                continue;
            }
            let q = div_round(m[t][k], m[t][t]);
            col_axpy(m, v, k, t, -q)?;
            if m[t][k] != 0 {
                swap_cols(m, v, t, k);
            }
        }
    }
}

fn div_round(a: i128, b: i128) -> i128 {
    // Round-to-nearest quotient keeps remainders ≤ |b|/2 during reduction.
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<i64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let cases = [
            mat(&[&[3, 0], &[0, 3]]),
            mat(&[&[2, 1], &[1, 2]]),
            mat(&[&[2, 1], &[1, 8]]),
            mat(&[&[1, 2, 3], &[0, 1, 4], &[5, 6, 0]]),
            mat(&[&[0, 2], &[3, 0]]),
        ];
        for c in &cases {
            assert_eq!(det_bareiss(c).unwrap(), det_cofactor(c).unwrap());
        }
    }

    #[test]
    fn singular_matrix_has_zero_det() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(det_bareiss(&m).unwrap(), 0);
    }

    #[test]
    fn integer_solve_is_accurate() {
        // diag(3,3) x = (-1,-1)
        let a = mat(&[&[3, 0], &[0, 3]]);
        let x = solve_integer_system(&a, &[-1.0, -1.0]).unwrap();
        assert!((x[0] + 1.0 / 3.0).abs() < 1e-15);
        assert!((x[1] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn float_solve_agrees_with_integer_solve() {
        let a = mat(&[&[2, 1], &[1, 8]]);
        let rhs = [-0.3, 1.7];
        let xi = solve_integer_system(&a, &rhs).unwrap();
        let af: Vec<Vec<f64>> = a
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        let xf = solve_f64(&af, &rhs).unwrap();
        for (u, v) in xi.iter().zip(&xf) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn smith_form_diagonalizes() {
        let cases = [
            mat(&[&[2, 1], &[1, 2]]),
            mat(&[&[3, 0], &[0, 3]]),
            mat(&[&[2, 1], &[1, 8]]),
            mat(&[&[4, 0], &[0, 4]]),
            mat(&[&[6, 4], &[2, 8]]),
        ];
        for a in &cases {
            let (u, s, v) = smith_normal_form(a).unwrap();
            // u a v must equal diag(s)
            let n = a.len();
            for i in 0..n {
                for j in 0..n {
                    let mut acc: i128 = 0;
                    for k in 0..n {
                        for l in 0..n {
                            acc += u[i][k] as i128 * a[k][l] as i128 * v[l][j] as i128;
                        }
                    }
                    let want = if i == j { s[i] as i128 } else { 0 };
                    assert_eq!(acc, want, "snf product mismatch at ({i},{j}) for {a:?}");
                }
            }
            // divisibility chain and |det| preservation
            for w in s.windows(2) {
                assert!(w[1] % w[0] == 0, "divisibility violated: {s:?}");
            }
            let det_a = det_bareiss(a).unwrap().unsigned_abs();
            let det_s: u64 = s.iter().map(|&x| x.unsigned_abs()).product();
            assert_eq!(det_a, det_s);
            // u, v unimodular
            let uu: Vec<Vec<i64>> = u.clone();
            let vv: Vec<Vec<i64>> = v.clone();
            assert_eq!(det_bareiss(&uu).unwrap().abs(), 1);
            assert_eq!(det_bareiss(&vv).unwrap().abs(), 1);
        }
    }

    #[test]
    fn condition_estimate_flags_identity_as_benign() {
        let a = mat(&[&[1, 0], &[0, 1]]);
        assert!(condition_estimate(&a) < 10.0);
    }
}
