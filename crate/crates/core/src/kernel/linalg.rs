//! Small dense complex linear algebra: LU with partial pivoting.

use num_complex::Complex;

use crate::Real;

pub type Matrix<F> = Vec<Vec<Complex<F>>>;

pub struct Lu<F> {
    lu: Matrix<F>,
    perm: Vec<usize>,
    sign: F,
    singular: bool,
}

impl<F: Real> Lu<F> {
    pub fn new(a: &Matrix<F>) -> Self {
        let n = a.len();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = F::one();
        let mut singular = false;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| lu[i][col].norm().partial_cmp(&lu[j][col].norm()).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or(col);
            if lu[pivot][col].norm() == F::zero() {
                singular = true;
                continue;
            }
            if pivot != col {
                lu.swap(pivot, col);
                perm.swap(pivot, col);
                sign = -sign;
            }
            for row in col + 1..n {
                let f = lu[row][col] / lu[col][col];
                lu[row][col] = f;
                for k in col + 1..n {
                    let v = lu[col][k];
                    lu[row][k] = lu[row][k] - f * v;
                }
            }
        }
        Lu { lu, perm, sign, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex<F> {
        if self.singular {
            return Complex::new(F::zero(), F::zero());
        }
        self.lu
            .iter()
            .enumerate()
            .fold(Complex::new(self.sign, F::zero()), |acc, (i, row)| acc * row[i])
    }

    pub fn solve(&self, b: &[Complex<F>]) -> Option<Vec<Complex<F>>> {
        if self.singular {
            return None;
        }
        let n = self.lu.len();
        let mut x: Vec<Complex<F>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let v = x[k];
                x[i] = x[i] - self.lu[i][k] * v;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = x[k];
                x[i] = x[i] - self.lu[i][k] * v;
            }
            x[i] = x[i] / self.lu[i][i];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        let n = self.lu.len();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex::new(F::zero(), F::zero()); n];
            e[j] = Complex::new(F::one(), F::zero());
            cols.push(self.solve(&e)?);
        }
        Some((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
    }
}

pub fn norm1<F: Real>(a: &Matrix<F>) -> F {
    let n = a.len();
    (0..n)
        .map(|j| a.iter().fold(F::zero(), |s, row| s + row[j].norm()))
        .fold(F::zero(), F::max)
}

/// `||A||_1 ||A^-1||_1`, infinite for singular matrices.
pub fn condition_1<F: Real>(a: &Matrix<F>) -> F {
    match Lu::new(a).inverse() {
        Some(inv) => norm1(a) * norm1(&inv),
        None => F::infinity(),
    }
}

pub fn det<F: Real>(a: &Matrix<F>) -> Complex<F> {
    if a.is_empty() {
        return Complex::new(F::one(), F::zero());
    }
    Lu::new(a).det()
}

/// `a` without row `r` and column `c`.
pub fn minor<F: Real>(a: &Matrix<F>, r: usize, c: usize) -> Matrix<F> {
    a.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn solve_and_det() {
        let a = vec![vec![c(0.0), c(2.0)], vec![c(1.0), c(1.0)]];
        let lu = Lu::new(&a);
        assert!((lu.det() - c(-2.0)).norm() < 1e-15);
        let x = lu.solve(&[c(4.0), c(3.0)]).unwrap();
        assert!((x[0] - c(1.0)).norm() < 1e-15 && (x[1] - c(2.0)).norm() < 1e-15);
        assert!((condition_1(&a) - 3.0).abs() < 1e-12);
        let m = minor(&a, 0, 1);
        assert_eq!(m, vec![vec![c(1.0)]]);
    }

    #[test]
    fn singular() {
        let a = vec![vec![c(1.0), c(2.0)], vec![c(2.0), c(4.0)]];
        assert!(Lu::new(&a).is_singular());
        assert!(condition_1(&a).is_infinite());
    }
}
