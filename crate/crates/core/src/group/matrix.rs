//! 2x2 integer matrices, exact and modular.

use crate::error::{Error, Result};

/// Row-major 2x2 integer matrix.
pub type Mat2 = [[i64; 2]; 2];

/// Residue matrix mod some modulus.
pub type ModMat2 = [[u64; 2]; 2];

pub const DEFAULT_SOL_MATRIX: Mat2 = [[2, 1], [1, 1]];

/// Default cap on the search for the order of a matrix mod n.
pub const DEFAULT_ORDER_CAP: u64 = 10_000_000;

pub fn det(a: &Mat2) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn trace(a: &Mat2) -> i64 {
    a[0][0] + a[1][1]
}

/// Rejects matrices that are not in GL2(Z) or have an eigenvalue on the unit circle.
pub fn check_hyperbolic(a: &Mat2) -> Result<()> {
    let d = det(a);
    let t = trace(a);
    let bad = |reason: &str| Err(Error::BadMatrix { matrix: *a, reason: reason.to_string() });
    match d {
        1 if t.abs() > 2 => Ok(()),
        1 => bad("det 1 needs |trace| > 2"),
        -1 if t != 0 => Ok(()),
        -1 => bad("det -1 with trace 0 has eigenvalues +-1"),
        _ => bad("determinant must be +-1"),
    }
}

/// Exact inverse of a unimodular matrix.
pub fn inverse(a: &Mat2) -> Mat2 {
    let d = det(a);
    debug_assert!(d == 1 || d == -1);
    [[d * a[1][1], -d * a[0][1]], [-d * a[1][0], d * a[0][0]]]
}

pub fn mul_checked(a: &Mat2, b: &Mat2) -> Result<Mat2> {
    let mut out = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let x = a[i][0].checked_mul(b[0][j]);
            let y = a[i][1].checked_mul(b[1][j]);
            out[i][j] = match (x, y) {
                (Some(x), Some(y)) => x.checked_add(y).ok_or(Error::Overflow("matrix product"))?,
                _ => return Err(Error::Overflow("matrix product")),
            };
        }
    }
    Ok(out)
}

/// A^k for any integer k, with checked arithmetic.
pub fn pow_checked(a: &Mat2, k: i64) -> Result<Mat2> {
    let mut base = if k < 0 { inverse(a) } else { *a };
    let mut e = k.unsigned_abs();
    let mut acc: Mat2 = [[1, 0], [0, 1]];
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_checked(&acc, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = mul_checked(&base, &base)?;
        }
    }
    Ok(acc)
}

pub fn apply_checked(a: &Mat2, v: [i64; 2]) -> Result<[i64; 2]> {
    let row = |r: [i64; 2]| -> Option<i64> { r[0].checked_mul(v[0])?.checked_add(r[1].checked_mul(v[1])?) };
    match (row(a[0]), row(a[1])) {
        (Some(x), Some(y)) => Ok([x, y]),
        _ => Err(Error::Overflow("matrix-vector product")),
    }
}

pub fn reduce(a: &Mat2, n: u64) -> ModMat2 {
    let r = |x: i64| x.rem_euclid(n as i64) as u64;
    [[r(a[0][0]), r(a[0][1])], [r(a[1][0]), r(a[1][1])]]
}

pub fn mul_mod(a: &ModMat2, b: &ModMat2, n: u64) -> ModMat2 {
    let n = n as u128;
    let mut out = [[0u64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let s = a[i][0] as u128 * b[0][j] as u128 + a[i][1] as u128 * b[1][j] as u128;
            out[i][j] = (s % n) as u64;
        }
    }
    out
}

pub fn apply_mod(a: &ModMat2, v: [u64; 2], n: u64) -> [u64; 2] {
    let n = n as u128;
    let x = (a[0][0] as u128 * v[0] as u128 + a[0][1] as u128 * v[1] as u128) % n;
    let y = (a[1][0] as u128 * v[0] as u128 + a[1][1] as u128 * v[1] as u128) % n;
    [x as u64, y as u64]
}

pub fn identity_mod(n: u64) -> ModMat2 {
    let one = 1 % n;
    [[one, 0], [0, one]]
}

/// Least k >= 1 with A^k = I mod n, by iterated modular multiplication.
pub fn matrix_order(a: &Mat2, n: u64, cap: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::BadParam(format!("modulus n = {n} must be >= 2")));
    }
    let d = det(a).rem_euclid(n as i64) as u64;
    if gcd(d, n) != 1 {
        return Err(Error::BadMatrix { matrix: *a, reason: format!("not invertible mod {n}") });
    }
    let base = reduce(a, n);
    let id = identity_mod(n);
    let mut acc = base;
    let mut k = 1u64;
    while acc != id {
        if k >= cap {
            return Err(Error::cap(format!("order of matrix mod {n}"), k + 1, cap));
        }
        acc = mul_mod(&acc, &base, n);
        k += 1;
    }
    Ok(k)
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
