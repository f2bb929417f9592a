//! Exact Doob martingale tables computed by suffix-sum dynamic programming.

use super::space::{FiniteProductSpace, SpaceError, SpaceLimits};

/// Everything about a space that the checks need, tabulated once.
///
/// Level `k` arrays are indexed by prefixes `(x_0, .., x_{k-1})` encoded in
/// mixed radix, so level 0 has a single entry and level `N` is the full table.
#[derive(Debug, Clone)]
pub struct ExactModel<'a> {
    pub space: &'a FiniteProductSpace,
    pub sizes: Vec<usize>,
    /// `suffix[k] = prod_{j >= k} |Lambda_j|`; the prefix of length `k` of a
    /// flat index is `flat / suffix[k]`.
    pub suffix: Vec<usize>,
    pub f: Vec<f64>,
    pub good: Vec<bool>,
    pub prob: Vec<f64>,
    /// `doob[k][prefix] = E(f | F_k)`.
    pub doob: Vec<Vec<f64>>,
    /// `fail[k][prefix] = P(X not in Gamma | F_k)`.
    pub fail: Vec<Vec<f64>>,
    /// `bad[j][prefix]`, `j < N`: the event `B_j`, i.e. `fail[j] > gamma_{j+1}`.
    pub bad: Vec<Vec<bool>>,
    /// `stopped[j][prefix]`: some `B_i` with `i <= j` holds on the prefix.
    pub stopped: Vec<Vec<bool>>,
}

impl<'a> ExactModel<'a> {
    pub fn build(space: &'a FiniteProductSpace, limits: &SpaceLimits) -> Result<Self, SpaceError> {
        space.validate(limits)?;
        let n = space.coords();
        let sizes = space.alphabet_sizes();
        let total = space.outcome_count() as usize;
        let mut suffix = vec![1usize; n + 1];
        for k in (0..n).rev() {
            suffix[k] = suffix[k + 1] * sizes[k];
        }

        let mut f = Vec::with_capacity(total);
        let mut good = Vec::with_capacity(total);
        let mut prob = Vec::with_capacity(total);
        let mut x = vec![0usize; n];
        for flat in 0..total {
            space.decode(flat, &mut x);
            f.push(space.f.eval(&x, flat));
            good.push(space.good.contains(&x, flat));
            prob.push(x.iter().enumerate().map(|(k, &v)| space.weights[k][v]).product());
        }

        let doob = Self::condition(&space.weights, &sizes, f.clone());
        let fail_table: Vec<f64> = good.iter().map(|&g| if g { 0.0 } else { 1.0 }).collect();
        let fail = Self::condition(&space.weights, &sizes, fail_table);

        let mut bad = Vec::with_capacity(n);
        let mut stopped: Vec<Vec<bool>> = Vec::with_capacity(n);
        for j in 0..n {
            let level: Vec<bool> = fail[j].iter().map(|&p| p > space.gamma[j]).collect();
            let st: Vec<bool> = (0..level.len())
                .map(|i| level[i] || (j > 0 && stopped[j - 1][i / sizes[j - 1]]))
                .collect();
            bad.push(level);
            stopped.push(st);
        }

        Ok(ExactModel { space, sizes, suffix, f, good, prob, doob, fail, bad, stopped })
    }

    /// Conditional expectations of `table` given each prefix, all levels.
    fn condition(weights: &[Vec<f64>], sizes: &[usize], table: Vec<f64>) -> Vec<Vec<f64>> {
        let n = sizes.len();
        let mut levels = vec![Vec::new(); n + 1];
        levels[n] = table;
        for k in (1..=n).rev() {
            let size = sizes[k - 1];
            let w = &weights[k - 1];
            let next: Vec<f64> = levels[k]
                .chunks_exact(size)
                .map(|block| block.iter().zip(w).map(|(v, p)| v * p).sum())
                .collect();
            levels[k - 1] = next;
        }
        levels
    }

    pub fn coords(&self) -> usize {
        self.sizes.len()
    }

    pub fn outcomes(&self) -> usize {
        self.f.len()
    }

    pub fn prefix(&self, flat: usize, k: usize) -> usize {
        flat / self.suffix[k]
    }

    pub fn mean(&self) -> f64 {
        self.doob[0][0]
    }

    pub fn fail_probability(&self) -> f64 {
        self.fail[0][0]
    }

    /// Stopping time `T`: the smallest `j < N` with `B_j`, else `N`.
    pub fn stopping_time(&self, flat: usize) -> usize {
        (0..self.coords())
            .find(|&j| self.bad[j][self.prefix(flat, j)])
            .unwrap_or(self.coords())
    }

    /// Membership in the bad event `not Gamma or B_0 or .. or B_{N-1}`.
    pub fn in_bad_event(&self, flat: usize) -> bool {
        let n = self.coords();
        !self.good[flat] || self.stopped[n - 1][self.prefix(flat, n - 1)]
    }

    /// `Y_k` along the outcome, `k = 0..=N`.
    pub fn doob_path(&self, flat: usize) -> Vec<f64> {
        (0..=self.coords()).map(|k| self.doob[k][self.prefix(flat, k)]).collect()
    }

    /// The stopped martingale `M_k = Y_{min(k, T)}`.
    pub fn stopped_path(&self, flat: usize) -> Vec<f64> {
        let stop = self.stopping_time(flat);
        (0..=self.coords())
            .map(|k| {
                let j = k.min(stop);
                self.doob[j][self.prefix(flat, j)]
            })
            .collect()
    }

    pub fn min_f(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_f(&self) -> f64 {
        self.f.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
