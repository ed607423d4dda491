//! Small dense Hermitian eigensolver.
//!
//! Cyclic complex Jacobi: each rotation first removes the phase of the pivot
//! element with a diagonal unitary, then applies a real Givens rotation.
//! Matrices here are at most a few dozen rows, so the O(n^3) per sweep cost
//! is irrelevant next to the determinism it buys.

use num_complex::Complex64 as C64;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
///
/// Each eigenvector has its first component with modulus above `1e-10`
/// rotated to be real and positive.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector belonging to `values[k]`.
    pub vectors: Vec<Vec<C64>>,
}

/// Diagonalizes the `n x n` Hermitian matrix stored row-major in `data`.
///
/// Only the upper triangle's consistency with the lower one is assumed, not
/// checked; callers validate Hermiticity.
pub fn hermitian_eigen(n: usize, data: &[C64]) -> HermitianEigen {
    assert_eq!(data.len(), n * n, "matrix storage does not match dimension");
    let mut a = data.to_vec();
    // v is stored row-major; eigenvectors end up in its columns
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = order
        .iter()
        .map(|&k| {
            let mut col: Vec<C64> = (0..n).map(|i| v[i * n + k]).collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    HermitianEigen { values, vectors }
}

fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    // diagonal unitary on index q making a[p][q] real positive
    let phase = apq / mag;
    let conj_phase = phase.conj();
    for i in 0..n {
        a[i * n + q] *= conj_phase;
    }
    for j in 0..n {
        a[q * n + j] *= phase;
    }
    for i in 0..n {
        v[i * n + q] *= conj_phase;
    }

    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * s;
        a[k * n + q] = akp * s + akq * c;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * s;
        a[q * n + k] = apk * s + aqk * c;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * s;
        v[k * n + q] = vkp * s + vkq * c;
    }
}

fn fix_phase(col: &mut [C64]) {
    if let Some(lead) = col.iter().find(|z| z.norm() > 1e-10).copied() {
        let rot = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z *= rot;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_keeps_basis() {
        let m = vec![c(0.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.8, 0.0)];
        let e = hermitian_eigen(2, &m);
        assert_eq!(e.values, vec![0.8, 0.2]);
        assert_eq!(e.vectors[0], vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn two_by_two_complex() {
        // [[1, i],[−i, 1]] has eigenvalues 2 and 0
        let m = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)];
        let e = hermitian_eigen(2, &m);
        assert!((e.values[0] - 2.0).abs() < 1e-14);
        assert!(e.values[1].abs() < 1e-14);
        let v = &e.vectors[0];
        // M v = 2 v
        let mv0 = m[0] * v[0] + m[1] * v[1];
        let mv1 = m[2] * v[0] + m[3] * v[1];
        assert!((mv0 - v[0] * 2.0).norm() < 1e-13);
        assert!((mv1 - v[1] * 2.0).norm() < 1e-13);
        assert!(v[0].im.abs() < 1e-15 && v[0].re > 0.0);
    }
}
