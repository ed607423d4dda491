//! In-house Jacobi eigensolver against nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use ort_core::linalg::hermitian_eigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    a
}

#[test]
fn eigenvalues_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1, 2, 3, 5, 8, 13, 24] {
        for _ in 0..5 {
            let a = random_hermitian(&mut rng, n);
            let ours = hermitian_eigen(n, &a);
            let mut theirs: Vec<f64> =
                DMatrix::from_row_slice(n, n, &a).symmetric_eigen().eigenvalues.iter().copied().collect();
            theirs.sort_by(|x, y| y.partial_cmp(x).unwrap());
            for (x, y) in ours.values.iter().zip(&theirs) {
                assert!((x - y).abs() < 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn eigenvectors_satisfy_eigen_equation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 10;
    let a = random_hermitian(&mut rng, n);
    let e = hermitian_eigen(n, &a);
    for (lam, v) in e.values.iter().zip(&e.vectors) {
        for i in 0..n {
            let av: C64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
            assert!((av - v[i] * lam).norm() < 1e-10);
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn degenerate_spectrum() {
    // projector of rank 2 in dimension 4
    let n = 4;
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    a[0] = C64::new(0.5, 0.0);
    a[1] = C64::new(0.0, 0.5);
    a[n] = C64::new(0.0, -0.5);
    a[n + 1] = C64::new(0.5, 0.0);
    a[3 * n + 3] = C64::new(1.0, 0.0);
    let e = hermitian_eigen(n, &a);
    let expect = [1.0, 1.0, 0.0, 0.0];
    for (x, y) in e.values.iter().zip(expect) {
        assert!((x - y).abs() < 1e-12);
    }
}
