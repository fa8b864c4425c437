//! Integer wavevectors, the half-lattice used for storage, and the
//! divergence-free frame attached to every wavevector.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid_arg, HvError, Result};

pub type Vec3 = [f64; 3];

/// A nonzero integer wavevector on the 3-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveVector {
    pub kx: i32,
    pub ky: i32,
    pub kz: i32,
}

impl WaveVector {
    pub fn new(kx: i32, ky: i32, kz: i32) -> Result<Self> {
        if kx == 0 && ky == 0 && kz == 0 {
            return Err(invalid_arg("the zero wavevector carries no mode (fields are mean-free)"));
        }
        Ok(Self { kx, ky, kz })
    }

    pub fn norm_sq(&self) -> i64 {
        let (x, y, z) = (self.kx as i64, self.ky as i64, self.kz as i64);
        x * x + y * y + z * z
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn as_f64(&self) -> Vec3 {
        [self.kx as f64, self.ky as f64, self.kz as f64]
    }

    pub fn neg(&self) -> Self {
        Self { kx: -self.kx, ky: -self.ky, kz: -self.kz }
    }

    /// Membership in the half-lattice: `kx > 0`, or `kx = 0, ky > 0`, or
    /// `kx = ky = 0, kz > 0`.
    pub fn in_half_lattice(&self) -> bool {
        self.kx > 0 || (self.kx == 0 && self.ky > 0) || (self.kx == 0 && self.ky == 0 && self.kz > 0)
    }

    /// Max-norm, used for grid sizing.
    pub fn max_abs(&self) -> i32 {
        self.kx.abs().max(self.ky.abs()).max(self.kz.abs())
    }
}

impl std::fmt::Display for WaveVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.kx, self.ky, self.kz)
    }
}

/// Orthonormal pair spanning the plane orthogonal to `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub b1: Vec3,
    pub b2: Vec3,
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Frame for `k`.
///
/// On the half-lattice: `b1 = k × a / |k × a|` with `a = e1` (or `e2` when
/// `k ∥ e1`) and `b2 = k̂ × b1`, so `(b1, b2, k̂)` is right-handed. Off the
/// half-lattice the frame is the negation of the frame at `-k`; the
/// orientation is then reversed, which the reality condition requires.
pub fn frame_vectors(k: WaveVector) -> Result<Frame> {
    if k.norm_sq() == 0 {
        return Err(invalid_arg("frame of the zero wavevector is undefined"));
    }
    if !k.in_half_lattice() {
        let f = frame_vectors(k.neg())?;
        return Ok(Frame { b1: scale(&f.b1, -1.0), b2: scale(&f.b2, -1.0) });
    }
    let kv = k.as_f64();
    let axis: Vec3 = if k.ky == 0 && k.kz == 0 { [0.0, 1.0, 0.0] } else { [1.0, 0.0, 0.0] };
    let ka = cross(&kv, &axis);
    let b1 = scale(&ka, 1.0 / dot(&ka, &ka).sqrt());
    let khat = scale(&kv, 1.0 / k.norm());
    let b2 = cross(&khat, &b1);
    Ok(Frame { b1, b2 })
}

/// Half-lattice wavevectors with `0 < |k| ≤ n`, in lexicographic order.
pub fn enumerate_lattice(n: i64) -> Result<Vec<WaveVector>> {
    if n <= 0 {
        return Err(HvError::InvalidConfig(format!("truncation n must be >= 1, got {n}")));
    }
    let n = n as i32;
    let r2 = (n as i64) * (n as i64);
    let mut out = Vec::new();
    for kx in -n..=n {
        for ky in -n..=n {
            for kz in -n..=n {
                let k = WaveVector { kx, ky, kz };
                if k.in_half_lattice() && k.norm_sq() <= r2 {
                    out.push(k);
                }
            }
        }
    }
    Ok(out)
}

/// One stored (half-lattice) mode with its precomputed geometry.
#[derive(Debug, Clone)]
pub struct Mode {
    pub k: WaveVector,
    pub frame: Frame,
    pub k2: f64,
    pub kabs: f64,
}

/// Index of a full-lattice wavevector into the half-lattice storage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Stored(usize),
    Conjugate(usize),
}

/// The Galerkin index set for truncation `n`, shared by every field of that
/// truncation.
#[derive(Debug)]
pub struct Lattice {
    n: usize,
    modes: Vec<Mode>,
    // Dense lookup over the cube [-n, n]^3: 0 = absent, +(i+1) stored, -(i+1) conjugate.
    lookup: Vec<i32>,
}

impl Lattice {
    pub fn new(n: usize) -> Result<Self> {
        let ks = enumerate_lattice(n as i64)?;
        let side = 2 * n + 1;
        let mut lookup = vec![0i32; side * side * side];
        let mut modes = Vec::with_capacity(ks.len());
        for (i, k) in ks.into_iter().enumerate() {
            let frame = frame_vectors(k)?;
            modes.push(Mode { k, frame, k2: k.norm_sq() as f64, kabs: k.norm() });
            let id = (i + 1) as i32;
            lookup[cube_index(n, k)] = id;
            lookup[cube_index(n, k.neg())] = -id;
        }
        Ok(Self { n, modes, lookup })
    }

    /// Process-wide cached lattice for truncation `n`.
    pub fn shared(n: usize) -> Result<Arc<Lattice>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Lattice>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("lattice cache poisoned");
        if let Some(l) = guard.get(&n) {
            return Ok(l.clone());
        }
        let l = Arc::new(Lattice::new(n)?);
        guard.insert(n, l.clone());
        Ok(l)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn slot(&self, k: WaveVector) -> Option<Slot> {
        let n = self.n as i32;
        if k.max_abs() > n {
            return None;
        }
        match self.lookup[cube_index(self.n, k)] {
            0 => None,
            id if id > 0 => Some(Slot::Stored((id - 1) as usize)),
            id => Some(Slot::Conjugate((-id - 1) as usize)),
        }
    }
}

fn cube_index(n: usize, k: WaveVector) -> usize {
    let side = 2 * n + 1;
    let o = n as i32;
    (((k.kx + o) as usize) * side + (k.ky + o) as usize) * side + (k.kz + o) as usize
}
