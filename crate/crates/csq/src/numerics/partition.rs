//! Ordered time partitions of [0, 1].

/// Strictly increasing times t_0 = 0 < ... < t_n = 1.
#[derive(Debug, Clone)]
pub struct Partition {
    times: Vec<f64>,
}

impl Partition {
    pub fn new(times: Vec<f64>) -> Option<Self> {
        if times.len() < 2 || times[0] != 0.0 || *times.last().unwrap() != 1.0 {
            return None;
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        Some(Partition { times })
    }

    /// Uniform partition with n intervals.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        let times = (0..=n).map(|i| i as f64 / n as f64).collect();
        Partition { times }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    /// Max gap between consecutive times.
    pub fn mesh(&self) -> f64 {
        self.times.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Insert a time point (no-op if already present).
    pub fn insert(&self, t: f64) -> Self {
        assert!((0.0..=1.0).contains(&t));
        let mut times = self.times.clone();
        if let Err(pos) = times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            times.insert(pos, t);
        }
        Partition { times }
    }

    /// Midpoint refinement of every interval.
    pub fn refined(&self) -> Self {
        let mut times = Vec::with_capacity(self.times.len() * 2 - 1);
        for w in self.times.windows(2) {
            times.push(w[0]);
            times.push(0.5 * (w[0] + w[1]));
        }
        times.push(1.0);
        Partition { times }
    }
}
