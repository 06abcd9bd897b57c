//! Matrix permanents.

use nalgebra::DMatrix;

use crate::combinatorics::Permutation;
use crate::error::{capacity, Error, Result};
use crate::scalar::{conj, cone, czero, Real, C};

pub const MAX_PERMANENT_DIM: usize = 16;

const KAHAN_FROM: usize = 10;

/// Permanent by Ryser's formula with Gray-code subset order, `O(2^n n)`.
pub fn permanent<T: Real>(a: &DMatrix<C<T>>) -> Result<C<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!("permanent of a {}x{} matrix", n, a.ncols())));
    }
    capacity("permanent dimension", n, MAX_PERMANENT_DIM)?;
    Ok(ryser(a))
}

pub(crate) fn ryser<T: Real>(a: &DMatrix<C<T>>) -> C<T> {
    let n = a.nrows();
    match n {
        0 => return cone(),
        1 => return a[(0, 0)],
        2 => return a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)],
        _ => {}
    }
    let compensate = n >= KAHAN_FROM;
    let mut row_sums = vec![czero::<T>(); n];
    let mut total = czero::<T>();
    let mut carry = czero::<T>();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let next = k ^ (k >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let adding = next & (1 << flipped) != 0;
        gray = next;
        for (i, r) in row_sums.iter_mut().enumerate() {
            if adding {
                *r += a[(i, flipped)];
            } else {
                *r -= a[(i, flipped)];
            }
        }
        let mut prod = row_sums[0];
        for r in &row_sums[1..] {
            prod *= *r;
        }
        // sign (-1)^{|S|}
        if next.count_ones() % 2 == 1 {
            prod = -prod;
        }
        if compensate {
            let y = prod - carry;
            let t = total + y;
            carry = (t - total) - y;
            total = t;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Direct sum over all `n!` permutations; reference for tests and tiny matrices.
pub fn permanent_naive<T: Real>(a: &DMatrix<C<T>>) -> Result<C<T>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!("permanent of a {}x{} matrix", n, a.ncols())));
    }
    if n == 0 {
        return Ok(cone());
    }
    let perms = crate::combinatorics::enumerate_permutations(n)?;
    Ok(perms.iter().fold(czero(), |acc, p| {
        acc + (0..n).fold(cone(), |prod, i| prod * a[(i, p.apply(i))])
    }))
}

/// `perm(M ∘ M*_σ)` where `M*_σ` is the conjugate of `M` with its rows permuted
/// by `σ`: row `σ(i)` of `M*_σ` is row `i` of `conj(M)`.
pub fn permuted_product_permanent<T: Real>(m: &DMatrix<C<T>>, sigma: &Permutation) -> Result<C<T>> {
    let n = m.nrows();
    if m.ncols() != n || sigma.len() != n {
        return Err(Error::Dimension(format!(
            "{}x{} transition matrix with a permutation on {} points",
            n,
            m.ncols(),
            sigma.len()
        )));
    }
    capacity("permanent dimension", n, MAX_PERMANENT_DIM)?;
    Ok(ryser(&permuted_product(m, sigma)))
}

pub(crate) fn permuted_product<T: Real>(m: &DMatrix<C<T>>, sigma: &Permutation) -> DMatrix<C<T>> {
    let n = m.nrows();
    let inv = sigma.inverse();
    DMatrix::from_fn(n, n, |j, k| m[(j, k)] * conj(m[(inv.apply(j), k)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::enumerate_permutations;
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C<f64>> {
        DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn small_examples() {
        let a = c(1.0, 0.5);
        let b = c(-0.3, 2.0);
        let cc = c(0.7, -1.0);
        let d = c(2.0, 0.1);
        let m = DMatrix::from_row_slice(2, 2, &[a, b, cc, d]);
        assert!((permanent(&m).unwrap() - (a * d + b * cc)).norm() < 1e-14);
        for n in 0..8 {
            let id = DMatrix::<C<f64>>::identity(n, n);
            assert!((permanent(&id).unwrap() - c(1.0, 0.0)).norm() < 1e-14);
        }
        let ones = DMatrix::from_element(3, 3, c(1.0, 0.0));
        assert!((permanent(&ones).unwrap() - c(6.0, 0.0)).norm() < 1e-12);
        assert_eq!(permanent(&DMatrix::<C<f64>>::zeros(0, 0)).unwrap(), c(1.0, 0.0));
        assert!(permanent(&DMatrix::<C<f64>>::zeros(17, 17)).is_err());
    }

    #[test]
    fn ryser_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=7 {
            for _ in 0..5 {
                let m = random_matrix(n, &mut rng);
                let r = permanent(&m).unwrap();
                let d = permanent_naive(&m).unwrap();
                assert!((r - d).norm() <= 1e-10 * d.norm().max(1.0), "n={n}: {r} vs {d}");
            }
        }
    }

    #[test]
    fn compensated_branch_matches_ones() {
        // perm of the all-ones n×n matrix is n!
        let ones = DMatrix::from_element(11, 11, c(1.0f64, 0.0));
        let p = permanent(&ones).unwrap();
        assert!((p.re - 39916800.0).abs() / 39916800.0 < 1e-12);
    }

    #[test]
    fn single_precision() {
        let ones = DMatrix::from_element(4, 4, c(1.0f32, 0.0));
        assert!((permanent(&ones).unwrap().re - 24.0f32).abs() < 1e-4);
    }

    #[test]
    fn inverse_permutation_conjugates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            let m = random_matrix(n, &mut rng);
            for s in enumerate_permutations(n).unwrap() {
                let a = permuted_product_permanent(&m, &s).unwrap();
                let b = permuted_product_permanent(&m, &s.inverse()).unwrap();
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn beamsplitter_swap_term() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let m = DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
        let swap = Permutation::transposition(2, 0, 1).unwrap();
        let abs = m.map(|z| c(z.norm_sqr(), 0.0));
        let s = permuted_product_permanent(&m, &swap).unwrap();
        assert!((s + permanent(&abs).unwrap()).norm() < 1e-15);
        // P(1,1) = perm|M|² + x² · swap term = (1 − x²)/2
        let x2 = 0.36;
        let p = permanent(&abs).unwrap() + s * x2;
        assert!((p.re - (1.0 - x2) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn identity_gives_squared_moduli() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(3, &mut rng);
        let abs = m.map(|z| c(z.norm_sqr(), 0.0));
        let a = permuted_product_permanent(&m, &Permutation::identity(3)).unwrap();
        assert!((a - permanent(&abs).unwrap()).norm() < 1e-12);
    }
}
