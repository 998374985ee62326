//! Deterministic random streams.
//!
//! Streams are keyed by `(master seed, sample size, replication, attempt)`
//! through a splitmix-style hash, so any replication can be regenerated in
//! isolation and results do not depend on execution order or thread count.
//! The generator is xoshiro256++ with Box-Muller normals.

#[derive(Debug, Clone)]
pub struct Stream {
    state: [u64; 4],
    cached_normal: Option<f64>,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(z: u64) -> u64 {
    let mut z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Stream {
    /// A stream keyed by an arbitrary word sequence.
    pub fn from_key(words: &[u64]) -> Self {
        let mut h = 0x6a09_e667_f3bc_c909u64; // arbitrary nonzero start
        for &w in words {
            h = splitmix(h ^ splitmix(w));
        }
        let mut state = [0u64; 4];
        for slot in &mut state {
            h = splitmix(h);
            *slot = h;
        }
        // xoshiro must not start from the all-zero state
        if state.iter().all(|&s| s == 0) {
            state[0] = GOLDEN;
        }
        Self { state, cached_normal: None }
    }

    fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (a, b).
    pub fn uniform_in(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard normal via Box-Muller; the paired variate is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.cached_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.cached_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// The stream for replication `k` of sample size `n` under `master_seed`;
/// `attempt` separates the fallback streams used when a replication must be
/// regenerated.
pub fn derive_stream(master_seed: u64, n: u64, k: u64, attempt: u64) -> Stream {
    Stream::from_key(&[master_seed, n, k, attempt])
}
