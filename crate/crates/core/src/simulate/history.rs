use crate::error::{Error, Result};
use crate::model::HeatModelSpec;

/// Relative distance (in units of `dt`) under which a lookup snaps to a grid node.
const NODE_SNAP: f64 = 1e-9;

/// Trailing window of spectral states on the grid `k·dt`, realizing the
/// segment `X_t` over `[t_now − r_buf, t_now]` with `r_buf ≥ r + dt`.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    dt: f64,
    n_modes: usize,
    capacity: usize,
    data: Vec<f64>,
    newest: i64,
}

impl HistoryBuffer {
    /// Empty (all-zero) buffer ending at `t = 0`.
    pub fn zeros(dt: f64, r: f64, n_modes: usize) -> Self {
        assert!(dt > 0.0 && r >= 0.0 && n_modes > 0);
        let capacity = (r / dt).ceil() as usize + 2;
        Self {
            dt,
            n_modes,
            capacity,
            data: vec![0.0; capacity * n_modes],
            newest: 0,
        }
    }

    /// Buffer holding the initial segment `φ` at the grid nodes of `[−r_buf, 0]`;
    /// nodes before `−r` repeat `φ(−r)`.
    pub fn from_initial_segment(m: &HeatModelSpec, dt: f64) -> Self {
        let r = m.r();
        let mut buf = Self::zeros(dt, r, m.n_modes);
        let oldest = buf.oldest();
        for k in oldest..=0 {
            let s = (k as f64 * dt).max(-r);
            let slot = buf.slot(k);
            m.phi.fill(s, r, &mut buf.data[slot..slot + m.n_modes]);
        }
        buf
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// Buffered span `r_buf`.
    pub fn span(&self) -> f64 {
        (self.capacity - 1) as f64 * self.dt
    }

    pub fn t_now(&self) -> f64 {
        self.newest as f64 * self.dt
    }

    /// `[t_now − r_buf, t_now]`.
    pub fn window(&self) -> (f64, f64) {
        (self.oldest() as f64 * self.dt, self.t_now())
    }

    fn oldest(&self) -> i64 {
        self.newest - self.capacity as i64 + 1
    }

    fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.capacity as i64) as usize * self.n_modes
    }

    fn node(&self, k: i64) -> &[f64] {
        let s = self.slot(k);
        &self.data[s..s + self.n_modes]
    }

    /// State at `t_now`.
    pub fn current(&self) -> &[f64] {
        self.node(self.newest)
    }

    /// Appends the state at `t_now + dt`, dropping the oldest node.
    pub fn push(&mut self, state: &[f64]) {
        assert_eq!(state.len(), self.n_modes);
        self.newest += 1;
        let s = self.slot(self.newest);
        self.data[s..s + self.n_modes].copy_from_slice(state);
    }

    /// Linear interpolation of the two grid states bracketing `s`.
    pub fn lookup_into(&self, s: f64, out: &mut [f64]) -> Result<()> {
        let (lo, hi) = self.window();
        let x = s / self.dt;
        let oldest = self.oldest() as f64;
        if !(x >= oldest - NODE_SNAP && x <= self.newest as f64 + NODE_SNAP) {
            return Err(Error::HistoryOutOfRange { s, lo, hi });
        }
        let mut k = x.floor();
        let mut w = x - k;
        if w > 1.0 - NODE_SNAP {
            k += 1.0;
            w = 0.0;
        }
        let k = (k as i64).clamp(self.oldest(), self.newest);
        if w < NODE_SNAP || k == self.newest {
            out.copy_from_slice(self.node(k));
            return Ok(());
        }
        let (a, b) = (self.node(k), self.node(k + 1));
        for ((o, x0), x1) in out.iter_mut().zip(a).zip(b) {
            *o = x0 + w * (x1 - x0);
        }
        Ok(())
    }

    pub fn lookup(&self, s: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_modes];
        self.lookup_into(s, &mut out)?;
        Ok(out)
    }
}
