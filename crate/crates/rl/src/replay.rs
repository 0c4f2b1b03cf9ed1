//! Replay buffer storing reward components alongside the scalar reward.
//!
//! Keeping the component vector per transition lets the tuning loop re-weight
//! past experience under a new lambda without re-simulating anything.

use crate::RlError;
use auv_core::tasks::REWARD_COMPONENT_NAMES;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Nonnegative weights, one per reward component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub names: Vec<String>,
    pub values: Vec<f64>,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            names: REWARD_COMPONENT_NAMES.iter().map(|s| s.to_string()).collect(),
            values: vec![1.0, 10.0, 50.0, 5.0, 0.05, 0.1],
        }
    }
}

impl RewardWeights {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn validate(&self) -> Result<(), RlError> {
        if self.names.len() != self.values.len() {
            return Err(RlError::LengthMismatch { weights: self.values.len(), components: self.names.len() });
        }
        if self.values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(RlError::InvalidConfig("reward weights must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Weighted reward: the dot product `lambda . components`.
pub fn compute_reward(components: &[f64], weights: &RewardWeights) -> Result<f64, RlError> {
    if components.len() != weights.values.len() {
        return Err(RlError::LengthMismatch { weights: weights.values.len(), components: components.len() });
    }
    let mut r = 0.0;
    for i in 0..components.len() {
        r += weights.values[i] * components[i];
    }
    Ok(r)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transition {
    pub obs: Vec<f64>,
    /// Normalized action in (-1, 1)^3, pre-scaling.
    pub action: Vec<f64>,
    pub reward: f64,
    pub components: Vec<f64>,
    pub next_obs: Vec<f64>,
    pub done: bool,
}

/// Fixed-capacity ring buffer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplayBuffer {
    data: Vec<Transition>,
    head: usize,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self { data: Vec::with_capacity(capacity.min(1 << 20)), head: 0, capacity }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn push(&mut self, t: Transition) {
        if self.data.len() < self.capacity {
            self.data.push(t);
        } else {
            self.data[self.head] = t;
            self.head = (self.head + 1) % self.capacity;
        }
    }

    pub fn get(&self, i: usize) -> &Transition {
        &self.data[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.data.iter()
    }

    pub fn sample_indices(&self, batch: usize, rng: &mut impl Rng) -> Vec<usize> {
        (0..batch).map(|_| rng.gen_range(0..self.data.len())).collect()
    }

    /// Recompute every stored scalar reward under new weights.
    pub fn reweight(&mut self, weights: &RewardWeights) -> Result<(), RlError> {
        for t in &mut self.data {
            t.reward = compute_reward(&t.components, weights)?;
        }
        Ok(())
    }
}
