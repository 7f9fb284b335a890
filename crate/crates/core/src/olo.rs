//! Online linear optimization: regret matching, regret matching plus and
//! Hedge, with helpers for measuring regret and for lazy segment schedules.

use crate::error::{Error, Result};

/// Positive-part sums below this value fall back to the uniform strategy.
pub const POSITIVE_FLOOR: f64 = 1e-12;

/// State of one online learner over a fixed action set.
#[derive(Debug, Clone, PartialEq)]
pub struct OloState {
    pub cumulative_regret: Vec<f64>,
    pub cumulative_reward: Vec<f64>,
    pub cumulative_scalar_reward: f64,
    pub hedge_score: Vec<f64>,
    pub current: Vec<f64>,
}

impl OloState {
    pub fn new(action_count: usize) -> Self {
        assert!(action_count > 0, "an OLO needs at least one action");
        Self {
            cumulative_regret: vec![0.0; action_count],
            cumulative_reward: vec![0.0; action_count],
            cumulative_scalar_reward: 0.0,
            hedge_score: vec![0.0; action_count],
            current: vec![1.0 / action_count as f64; action_count],
        }
    }

    pub fn action_count(&self) -> usize {
        self.current.len()
    }

    fn check(&self, reward: &[f64]) -> Result<()> {
        if reward.len() != self.action_count() {
            return Err(Error::RewardLength {
                expected: self.action_count(),
                got: reward.len(),
            });
        }
        if reward.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteReward);
        }
        Ok(())
    }

    /// Plays `current` against `reward`, then moves to the regret-matching
    /// strategy.
    pub fn rm_step(&mut self, reward: &[f64]) -> Result<()> {
        self.check(reward)?;
        self.regret_update(reward, false);
        Ok(())
    }

    /// As [`rm_step`](Self::rm_step) but cumulative regrets are clipped at
    /// zero after every update.
    pub fn rm_plus_step(&mut self, reward: &[f64]) -> Result<()> {
        self.check(reward)?;
        self.regret_update(reward, true);
        Ok(())
    }

    /// Exponential weights with learning rate `rate`.
    pub fn hedge_step(&mut self, reward: &[f64], rate: f64) -> Result<()> {
        self.check(reward)?;
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!("hedge rate must be nonnegative, got {rate}")));
        }
        self.record(reward);
        for (s, c) in self.hedge_score.iter_mut().zip(reward) {
            *s += rate * c;
        }
        let max = self
            .hedge_score
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (w, s) in self.current.iter_mut().zip(&self.hedge_score) {
            *w = (s - max).exp();
            sum += *w;
        }
        for w in &mut self.current {
            *w /= sum;
        }
        Ok(())
    }

    fn record(&mut self, reward: &[f64]) -> f64 {
        let played = dot(&self.current, reward);
        for (r, c) in self.cumulative_reward.iter_mut().zip(reward) {
            *r += c;
        }
        self.cumulative_scalar_reward += played;
        played
    }

    /// Unchecked RM / RM+ update used on solver hot paths.
    pub(crate) fn regret_update(&mut self, reward: &[f64], plus: bool) {
        let played = self.record(reward);
        for (r, c) in self.cumulative_regret.iter_mut().zip(reward) {
            *r += c - played;
            if plus && *r < 0.0 {
                *r = 0.0;
            }
        }
        regret_matching(&self.cumulative_regret, &mut self.current);
    }

    /// Regret against the best fixed action so far.
    pub fn regret(&self) -> f64 {
        let best = self
            .cumulative_reward
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        best - self.cumulative_scalar_reward
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Writes the distribution proportional to the positive part of `regret`
/// into `out`, or uniform when the positive mass is negligible.
pub fn regret_matching(regret: &[f64], out: &mut [f64]) {
    let pos: f64 = regret.iter().map(|r| r.max(0.0)).sum();
    if pos > POSITIVE_FLOOR {
        for (w, r) in out.iter_mut().zip(regret) {
            *w = r.max(0.0) / pos;
        }
    } else {
        let u = 1.0 / out.len() as f64;
        out.fill(u);
    }
}

/// Hedge learning rate `sqrt(ln A / (T · max c²))`.
///
/// Returns 0 when the reward bound is 0 or there is a single action.
pub fn tuned_hedge_rate(action_count: usize, horizon: usize, max_sq_reward: f64) -> f64 {
    let denom = horizon as f64 * max_sq_reward;
    if action_count < 2 || denom <= 0.0 {
        return 0.0;
    }
    ((action_count as f64).ln() / denom).sqrt()
}

/// `max_a Σ_t c_t(a) − Σ_t ⟨w_t, c_t⟩`.
///
/// This can be negative when the plays beat every fixed action.
pub fn measure_olo_regret(rewards: &[Vec<f64>], plays: &[Vec<f64>]) -> Result<f64> {
    if rewards.len() != plays.len() {
        return Err(Error::LengthMismatch(rewards.len(), plays.len()));
    }
    let Some(first) = rewards.first() else {
        return Ok(0.0);
    };
    let mut total = vec![0.0; first.len()];
    let mut achieved = 0.0;
    for (c, w) in rewards.iter().zip(plays) {
        if c.len() != total.len() || w.len() != total.len() {
            return Err(Error::RewardLength {
                expected: total.len(),
                got: c.len().min(w.len()),
            });
        }
        for (t, x) in total.iter_mut().zip(c) {
            *t += x;
        }
        achieved += dot(c, w);
    }
    Ok(total.iter().copied().fold(f64::NEG_INFINITY, f64::max) - achieved)
}

/// Which updater a learner uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Updater {
    Rm,
    RmPlus,
    Hedge { rate: f64 },
}

impl OloState {
    pub fn step(&mut self, updater: Updater, reward: &[f64]) -> Result<()> {
        match updater {
            Updater::Rm => self.rm_step(reward),
            Updater::RmPlus => self.rm_plus_step(reward),
            Updater::Hedge { rate } => self.hedge_step(reward, rate),
        }
    }
}

/// Runs `updater` over `rewards` and returns the strategy played each round.
pub fn play(updater: Updater, rewards: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let Some(first) = rewards.first() else {
        return Ok(Vec::new());
    };
    let mut s = OloState::new(first.len());
    let mut plays = Vec::with_capacity(rewards.len());
    for c in rewards {
        plays.push(s.current.clone());
        s.step(updater, c)?;
    }
    Ok(plays)
}

/// Sums consecutive rewards over segments of the given lengths.
pub fn collapse_segments(rewards: &[Vec<f64>], lengths: &[usize]) -> Result<Vec<Vec<f64>>> {
    let total: usize = lengths.iter().sum();
    if total != rewards.len() {
        return Err(Error::LengthMismatch(rewards.len(), total));
    }
    let mut out = Vec::with_capacity(lengths.len());
    let mut t = 0;
    for &len in lengths {
        let mut sum = vec![0.0; rewards.first().map_or(0, Vec::len)];
        for c in &rewards[t..t + len] {
            for (s, x) in sum.iter_mut().zip(c) {
                *s += x;
            }
        }
        out.push(sum);
        t += len;
    }
    Ok(out)
}

/// Lazy schedule: the strategy is held fixed within each segment and
/// updated once at its end with the segment's summed reward.
///
/// Returns the strategy played at every original round.
pub fn play_lazy(updater: Updater, rewards: &[Vec<f64>], lengths: &[usize]) -> Result<Vec<Vec<f64>>> {
    let collapsed = collapse_segments(rewards, lengths)?;
    let per_segment = play(updater, &collapsed)?;
    let mut plays = Vec::with_capacity(rewards.len());
    for (w, &len) in per_segment.iter().zip(lengths) {
        plays.extend(std::iter::repeat_n(w.clone(), len));
    }
    Ok(plays)
}

/// Σ_t ‖c_t‖².
pub fn sum_sq_norms(rewards: &[Vec<f64>]) -> f64 {
    rewards.iter().map(|c| dot(c, c)).sum()
}
