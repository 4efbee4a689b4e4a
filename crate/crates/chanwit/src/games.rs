//! Communication games: payoff matrices and the transformations used to
//! reduce them (affine rescaling, binary-output reduction, unbiasedness,
//! channel-independent upper bound).

use crate::consts;
use crate::error::{Error, Result};

/// A game is an n×m real payoff matrix g with the prior already absorbed,
/// `g[x][y]` being the payoff mass for input x and output y.
#[derive(Clone, Debug, PartialEq)]
pub struct Game {
    n: usize,
    m: usize,
    g: Vec<f64>,
}

impl Game {
    pub fn new(n: usize, m: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || m == 0 || entries.len() != n * m {
            return Err(Error::InvalidGame {
                detail: format!("{} entries for {}x{} game", entries.len(), n, m),
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidGame {
                detail: "non-finite payoff entry".into(),
            });
        }
        Ok(Self { n, m, g: entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidGame {
                detail: "ragged payoff rows".into(),
            });
        }
        Self::new(n, m, rows.concat())
    }

    /// Binary discrimination game diag(g0, 1-g0).
    pub fn binary_discrimination(g0: f64) -> Result<Self> {
        if !((-consts::PARAM_TOL..=1.0 + consts::PARAM_TOL).contains(&g0)) {
            return Err(Error::InvalidParameter {
                name: "g0",
                value: g0,
                expected: "[0, 1]",
            });
        }
        Self::from_rows(&[vec![g0, 0.0], vec![0.0, 1.0 - g0]])
    }

    /// Discrimination game with the given diagonal.
    pub fn discrimination(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut g = vec![0.0; n * n];
        for (x, &v) in diag.iter().enumerate() {
            g[x * n + x] = v;
        }
        Self::new(n, n, g)
    }

    /// Builds `g[x][y] = p[x]·u[x][y]` from a prior and a payoff function.
    pub fn from_prior_payoff(p: &[f64], u: &[Vec<f64>]) -> Result<Self> {
        if p.len() != u.len() {
            return Err(Error::InvalidPrior {
                detail: format!("prior length {} vs {} payoff rows", p.len(), u.len()),
            });
        }
        if p.iter()
            .any(|&x| x < -consts::PRIOR_SUM_TOL || !x.is_finite())
        {
            return Err(Error::InvalidPrior {
                detail: "negative or non-finite prior entry".into(),
            });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > consts::PRIOR_SUM_TOL {
            return Err(Error::InvalidPrior {
                detail: format!("prior sums to {sum}, expected 1"),
            });
        }
        let rows: Vec<Vec<f64>> = p
            .iter()
            .zip(u)
            .map(|(&px, row)| row.iter().map(|&uxy| px * uxy).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn inputs(&self) -> usize {
        self.n
    }

    pub fn outputs(&self) -> usize {
        self.m
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.g[x * self.m + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.g[x * self.m..(x + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.g.chunks(self.m)
    }

    /// `g'[x][y] = alpha·(g[x][y] + beta[x])`. The utility of any channel
    /// transforms as `U(C, g') = alpha·(U(C, g) + Σ beta[x])` and is
    /// attained by the same encoding and decoding.
    pub fn affine_transform(&self, alpha: f64, beta: &[f64]) -> Result<Self> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                expected: "nonnegative",
            });
        }
        if beta.len() != self.n {
            return Err(Error::InvalidGame {
                detail: format!("beta length {} vs {} inputs", beta.len(), self.n),
            });
        }
        let rows: Vec<Vec<f64>> = self
            .rows()
            .zip(beta)
            .map(|(row, &b)| row.iter().map(|&x| alpha * (x + b)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Channel-independent bound `Σ_x max_y g[x][y]`.
    pub fn upper_bound(&self) -> f64 {
        self.rows()
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .sum()
    }

    /// True iff every column sums to zero.
    pub fn is_unbiased(&self) -> bool {
        self.column_sums()
            .iter()
            .all(|s| s.abs() <= consts::UNBIASED_COL_TOL)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.m];
        for row in self.rows() {
            for (s, &x) in sums.iter_mut().zip(row) {
                *s += x;
            }
        }
        sums
    }

    /// Reduces a binary-output game to an equivalent binary discrimination
    /// game diag(g0, 1-g0) with U(C, g) = a·U(C, g') + b for every channel.
    pub fn reduce_binary_output(&self) -> Result<BinaryReduction> {
        if self.m != 2 {
            return Err(Error::InvalidGame {
                detail: format!("binary-output reduction needs m = 2, got m = {}", self.m),
            });
        }
        let diffs: Vec<f64> = self.rows().map(|r| r[0] - r[1]).collect();
        let a: f64 = diffs.iter().map(|d| d.abs()).sum();
        let b: f64 = self.rows().map(|r| r[0].min(r[1])).sum();
        if a == 0.0 {
            // constant payoff per row: the game is trivial and worth b for
            // any channel (here b = Σ_x g[x][0])
            return Ok(BinaryReduction {
                a: 0.0,
                b,
                g0: None,
            });
        }
        // Θ(0) = 1, though rows with equal entries contribute 0 either way
        let g0 = diffs.iter().filter(|&&d| d >= 0.0).sum::<f64>() / a;
        Ok(BinaryReduction {
            a,
            b,
            g0: Some(g0.clamp(0.0, 1.0)),
        })
    }

    /// Shifts each row by -min so every entry is nonnegative; returns the
    /// shifted game and the offset Σ_x beta_x that must be subtracted from
    /// utilities computed on it.
    pub fn shift_nonneg(&self) -> (Self, f64) {
        let betas: Vec<f64> = self
            .rows()
            .map(|row| -row.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let offset: f64 = betas.iter().sum();
        let shifted = self
            .affine_transform(1.0, &betas)
            .expect("shift is always a valid affine transform");
        (shifted, offset)
    }
}

/// Outcome of the binary-output reduction. `g0 == None` flags the trivial
/// game (a = 0), whose utility is the constant `b` for every channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinaryReduction {
    pub a: f64,
    pub b: f64,
    pub g0: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_prior_payoff_examples() {
        let g = Game::from_prior_payoff(&[0.5, 0.5], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(
            g,
            Game::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap()
        );

        let g = Game::from_prior_payoff(&[1.0, 0.0], &[vec![0.3, 0.7], vec![2.0, 5.0]]).unwrap();
        assert_eq!(g.row(0), &[0.3, 0.7]);
        assert_eq!(g.row(1), &[0.0, 0.0]);

        let g = Game::from_prior_payoff(&[0.3, 0.7], &[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(
            g,
            Game::from_rows(&[vec![0.3, 0.0], vec![0.0, 1.4]]).unwrap()
        );

        assert!(Game::from_prior_payoff(&[0.4, 0.4], &[vec![1.0], vec![1.0]]).is_err());
        assert!(Game::from_prior_payoff(&[-0.1, 1.1], &[vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn affine_transform_examples() {
        let g = Game::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(g.affine_transform(1.0, &[0.0, 0.0]).unwrap(), g);
        let doubled = g.affine_transform(2.0, &[0.0, 0.0]).unwrap();
        assert_eq!(doubled.entry(0, 0), 1.0);
        assert_eq!(doubled.entry(1, 1), 1.0);
        assert!(g.affine_transform(-1.0, &[0.0, 0.0]).is_err());

        // shift by row minima: all rows end up with min 0
        let g = Game::from_rows(&[vec![0.4, 0.1], vec![-0.3, 0.5]]).unwrap();
        let beta: Vec<f64> = g
            .rows()
            .map(|r| -r.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let shifted = g.affine_transform(1.0, &beta).unwrap();
        for row in shifted.rows() {
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min.abs() < 1e-15);
        }
    }

    #[test]
    fn upper_bound_examples() {
        assert!(
            (Game::from_rows(&[vec![0.6, 0.0], vec![0.0, 0.4]])
                .unwrap()
                .upper_bound()
                - 1.0)
                .abs()
                < 1e-15
        );
        assert!(
            (Game::from_rows(&[vec![0.4, 0.1], vec![0.0, 0.5]])
                .unwrap()
                .upper_bound()
                - 0.9)
                .abs()
                < 1e-15
        );
        let neg = Game::from_rows(&[vec![-0.5, -0.2], vec![-0.4, -0.9]]).unwrap();
        assert!((neg.upper_bound() + 0.6).abs() < 1e-15);
    }

    #[test]
    fn unbiased_examples() {
        assert!(Game::from_rows(&[vec![0.5, -0.5], vec![-0.5, 0.5]])
            .unwrap()
            .is_unbiased());
        assert!(!Game::from_rows(&[vec![0.5, 0.0], vec![0.0, 0.5]])
            .unwrap()
            .is_unbiased());
        assert!(Game::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0]])
            .unwrap()
            .is_unbiased());
    }

    #[test]
    fn reduce_binary_examples() {
        let g = Game::from_rows(&[vec![0.4, 0.1], vec![0.0, 0.5]]).unwrap();
        let r = g.reduce_binary_output().unwrap();
        assert!((r.a - 0.8).abs() < 1e-15);
        assert!((r.b - 0.1).abs() < 1e-15);
        assert!((r.g0.unwrap() - 0.375).abs() < 1e-15);

        let g = Game::from_rows(&[vec![0.7, 0.0], vec![0.0, 0.3]]).unwrap();
        let r = g.reduce_binary_output().unwrap();
        assert!((r.a - 1.0).abs() < 1e-15);
        assert!(r.b.abs() < 1e-15);
        assert!((r.g0.unwrap() - 0.7).abs() < 1e-15);

        // a row with equal entries contributes nothing to the scale, so the
        // Θ(0) convention cannot change the reduction
        let g = Game::from_rows(&[vec![0.3, 0.3], vec![0.5, 0.1]]).unwrap();
        let r = g.reduce_binary_output().unwrap();
        assert!((r.a - 0.4).abs() < 1e-15);
        assert!((r.b - 0.4).abs() < 1e-15);
        assert!((r.g0.unwrap() - 1.0).abs() < 1e-15);

        let g = Game::from_rows(&[vec![0.2, 0.2], vec![0.6, 0.6]]).unwrap();
        let r = g.reduce_binary_output().unwrap();
        assert_eq!(r.a, 0.0);
        assert!((r.b - 0.8).abs() < 1e-15);
        assert_eq!(r.g0, None);

        assert!(Game::from_rows(&[vec![1.0, 2.0, 3.0]])
            .unwrap()
            .reduce_binary_output()
            .is_err());
    }

    #[test]
    fn shift_nonneg_roundtrip() {
        let g = Game::from_rows(&[vec![0.4, -0.1], vec![-0.3, 0.5]]).unwrap();
        let (shifted, offset) = g.shift_nonneg();
        assert!(shifted.rows().flatten().all(|&x| x >= 0.0));
        assert!((offset - 0.4).abs() < 1e-15);
        // upper bound transforms consistently
        assert!((shifted.upper_bound() - (g.upper_bound() + offset)).abs() < 1e-10);
        // inverse transform restores the game
        let betas: Vec<f64> = g
            .rows()
            .map(|r| r.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let back = shifted.affine_transform(1.0, &betas).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((back.entry(x, y) - g.entry(x, y)).abs() < 1e-12);
            }
        }
    }
}
