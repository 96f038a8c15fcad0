use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues of a Hermitian matrix stored row-major, by cyclic Jacobi
/// rotations. Iterates until the off-diagonal Frobenius norm is below
/// `1e-12` (scaled by the matrix norm when that exceeds 1).
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary, then applies the real symmetric rotation that zeroes it. Only
/// the strict upper triangle is read from the input; Hermiticity is assumed.
pub fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Result<Vec<f64>> {
    assert_eq!(entries.len(), dim * dim);
    let mut a = entries.to_vec();
    for i in 0..dim {
        for j in 0..i {
            a[i * dim + j] = a[j * dim + i].conj();
        }
        a[i * dim + i] = Complex64::new(a[i * dim + i].re, 0.0);
    }
    let scale = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = OFF_DIAGONAL_TOL * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(dim, &a) < tol {
            return Ok((0..dim).map(|i| a[i * dim + i].re).collect());
        }
        for p in 0..dim {
            for q in p + 1..dim {
                rotate(dim, &mut a, p, q);
            }
        }
    }
    if off_diagonal_norm(dim, &a) < tol {
        return Ok((0..dim).map(|i| a[i * dim + i].re).collect());
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}

fn off_diagonal_norm(dim: usize, a: &[Complex64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                sum += a[i * dim + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

fn rotate(dim: usize, a: &mut [Complex64], p: usize, q: usize) {
    let apq = a[p * dim + q];
    let g = apq.norm();
    if g < 1e-300 {
        return;
    }
    // e^{-iφ} where a_pq = g e^{iφ}
    let phase = apq.conj() / g;
    let app = a[p * dim + p].re;
    let aqq = a[q * dim + q].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..dim {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * dim + p];
        let akq = a[k * dim + q] * phase;
        let new_kp = akp * c - akq * s;
        let new_kq = akp * s + akq * c;
        a[k * dim + p] = new_kp;
        a[p * dim + k] = new_kp.conj();
        a[k * dim + q] = new_kq;
        a[q * dim + k] = new_kq.conj();
    }
    a[p * dim + p] = Complex64::new(app - t * g, 0.0);
    a[q * dim + q] = Complex64::new(aqq + t * g, 0.0);
    a[p * dim + q] = Complex64::new(0.0, 0.0);
    a[q * dim + p] = Complex64::new(0.0, 0.0);
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[a, b],[b*, d]]: (a+d)/2 ± sqrt(((a-d)/2)^2 + |b|^2)
        let (a, d, b) = (0.3, -1.1, c(0.4, -0.7));
        let ev = sorted(hermitian_eigenvalues(2, &[c(a, 0.0), b, b.conj(), c(d, 0.0)]).unwrap());
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((ev[0] - (mid - rad)).abs() < 1e-13);
        assert!((ev[1] - (mid + rad)).abs() < 1e-13);
    }

    #[test]
    fn diagonal_matrix_is_fixed() {
        let m = [c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-2.0, 0.0)];
        assert_eq!(sorted(hermitian_eigenvalues(2, &m).unwrap()), vec![-2.0, 3.0]);
    }

    #[test]
    fn pauli_y_has_eigenvalues_plus_minus_one() {
        let m = [c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)];
        let ev = sorted(hermitian_eigenvalues(2, &m).unwrap());
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_invariants() {
        // trace and Frobenius norm are preserved by unitary similarity
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for dim in [3usize, 8, 16] {
            let mut m = vec![c(0.0, 0.0); dim * dim];
            for i in 0..dim {
                m[i * dim + i] = c(rng.gen_range(-1.0..1.0), 0.0);
                for j in i + 1..dim {
                    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    m[i * dim + j] = z;
                    m[j * dim + i] = z.conj();
                }
            }
            let ev = hermitian_eigenvalues(dim, &m).unwrap();
            let trace: f64 = (0..dim).map(|i| m[i * dim + i].re).sum();
            let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum();
            assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-10);
            assert!((ev.iter().map(|x| x * x).sum::<f64>() - frob).abs() < 1e-10);
            // trace of M^3 agrees with the sum of cubes
            let mut m2 = vec![c(0.0, 0.0); dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    m2[i * dim + j] = (0..dim).map(|k| m[i * dim + k] * m[k * dim + j]).sum();
                }
            }
            let tr3: f64 = (0..dim)
                .map(|i| (0..dim).map(|k| m2[i * dim + k] * m[k * dim + i]).sum::<Complex64>().re)
                .sum();
            assert!((ev.iter().map(|x| x.powi(3)).sum::<f64>() - tr3).abs() < 1e-9);
        }
    }
}
