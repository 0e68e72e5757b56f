//! Discretization geometry and wavespeed models.

use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on grid points so a typo cannot exhaust memory.
pub const MAX_GRID_POINTS: usize = 1 << 27;

/// Regular 3D grid, x-fastest ordering. 2D/1D problems use trailing
/// dimensions of 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid3 {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// Minimum sampling rate: grid points per wavelength at the slowest
    /// wavespeed. Controls the spectral radius of the discrete Laplacian.
    pub l_min: f64,
}

impl Grid3 {
    pub fn new(n1: usize, n2: usize, n3: usize, l_min: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidModel("grid dimensions must be positive".into()));
        }
        let total = n1
            .checked_mul(n2)
            .and_then(|p| p.checked_mul(n3))
            .ok_or_else(|| Error::InvalidModel("grid size overflows".into()))?;
        if total > MAX_GRID_POINTS {
            return Err(Error::InvalidModel(format!(
                "grid has {total} points, above the cap of {MAX_GRID_POINTS}"
            )));
        }
        if !(l_min.is_finite() && l_min > 2.0) {
            return Err(Error::InvalidModel(format!(
                "sampling rate l_min = {l_min} must exceed 2 points per wavelength"
            )));
        }
        Ok(Grid3 { n1, n2, n3, l_min })
    }

    /// Below the spectral-method rate of 2.25 the discretization is legal but
    /// marginal; callers may surface this to the user.
    pub fn sampling_warning(&self) -> Option<String> {
        (self.l_min < 2.25).then(|| {
            format!("sampling rate {} is below 2.25 points per wavelength", self.l_min)
        })
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n1, self.n2, self.n3]
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        i1 + self.n1 * (i2 + self.n2 * i3)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let i1 = idx % self.n1;
        let rest = idx / self.n1;
        (i1, rest % self.n2, rest / self.n2)
    }

    /// Distance (in grid points) to the nearest boundary face, counting only
    /// axes with more than one point.
    pub fn boundary_distance(&self, idx: usize) -> usize {
        let (i1, i2, i3) = self.coords(idx);
        let mut d = usize::MAX;
        for (i, n) in [(i1, self.n1), (i2, self.n2), (i3, self.n3)] {
            if n > 1 {
                d = d.min(i).min(n - 1 - i);
            }
        }
        if d == usize::MAX {
            0
        } else {
            d
        }
    }

    /// Smallest extent over axes with more than one point.
    pub fn min_active_dim(&self) -> usize {
        [self.n1, self.n2, self.n3].into_iter().filter(|&n| n > 1).min().unwrap_or(1)
    }
}

/// Per-point sampling rates l_i >= l_min derived from a wavespeed field.
#[derive(Debug, Clone)]
pub struct WavespeedModel {
    pub grid: Grid3,
    l: Vec<f64>,
}

impl WavespeedModel {
    /// Builds from local sampling rates. The minimum must equal the grid's
    /// l_min: the mass matrix normalization assumes it.
    pub fn from_sampling_rates(grid: Grid3, l: Vec<f64>) -> Result<Self> {
        if l.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: l.len(),
                context: "wavespeed model",
            });
        }
        let mut min_l = f64::INFINITY;
        for &li in &l {
            if !(li.is_finite() && li > 0.0) {
                return Err(Error::InvalidModel("sampling rates must be finite positive".into()));
            }
            if li < grid.l_min * (1.0 - 1e-12) {
                return Err(Error::InvalidModel(format!(
                    "sampling rate {li} is below the grid minimum {}",
                    grid.l_min
                )));
            }
            min_l = min_l.min(li);
        }
        if (min_l - grid.l_min).abs() > 1e-9 * grid.l_min {
            return Err(Error::InvalidModel(format!(
                "minimum sampling rate {min_l} does not equal the grid l_min {}",
                grid.l_min
            )));
        }
        Ok(WavespeedModel { grid, l })
    }

    /// Constant-wavespeed model: every point at the minimum sampling rate.
    pub fn uniform(grid: Grid3) -> Self {
        let l = vec![grid.l_min; grid.len()];
        WavespeedModel { grid, l }
    }

    /// Converts a wavespeed field to sampling rates via l_i = l_min * c_i / c_min.
    pub fn from_wavespeed(grid: Grid3, c: &[f64], c_min: f64) -> Result<Self> {
        if !(c_min.is_finite() && c_min > 0.0) {
            return Err(Error::InvalidModel("c_min must be finite positive".into()));
        }
        let l = c.iter().map(|&ci| grid.l_min * ci / c_min).collect();
        Self::from_sampling_rates(grid, l)
    }

    /// Test model with eight spherical high-wavespeed anomalies at twice the
    /// background speed, centered on the (N/4, 3N/4) lattice with radius
    /// min(N)/8.
    pub fn eight_anomalies(grid: Grid3) -> Self {
        let radius = grid.min_active_dim() as f64 / 8.0;
        let centers_axis = |n: usize| -> Vec<f64> {
            if n > 1 {
                vec![n as f64 / 4.0, 3.0 * n as f64 / 4.0]
            } else {
                vec![0.0]
            }
        };
        let (c1, c2, c3) =
            (centers_axis(grid.n1), centers_axis(grid.n2), centers_axis(grid.n3));
        let mut l = vec![grid.l_min; grid.len()];
        for i3 in 0..grid.n3 {
            for i2 in 0..grid.n2 {
                for i1 in 0..grid.n1 {
                    let inside = c1.iter().any(|&x| {
                        c2.iter().any(|&y| {
                            c3.iter().any(|&z| {
                                let dx = i1 as f64 - x;
                                let dy = i2 as f64 - y;
                                let dz = i3 as f64 - z;
                                dx * dx + dy * dy + dz * dz <= radius * radius
                            })
                        })
                    });
                    if inside {
                        l[grid.index(i1, i2, i3)] = 2.0 * grid.l_min;
                    }
                }
            }
        }
        WavespeedModel { grid, l }
    }

    pub fn sampling_rates(&self) -> &[f64] {
        &self.l
    }
}

/// JSON sidecar describing a raw wavespeed binary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WavespeedSidecar {
    pub dims: [usize; 3],
    /// "float32" or "float64", little-endian, x-fastest order.
    pub dtype: String,
    pub c_min: f64,
    pub c_max: f64,
    pub spacing: f64,
}

/// Reads a raw little-endian wavespeed array plus its JSON sidecar
/// (`<path>.json`) and converts it to sampling rates.
pub fn read_wavespeed_model(path: &Path, l_min: f64) -> Result<WavespeedModel> {
    let sidecar_path = sidecar_path_for(path);
    let sidecar: WavespeedSidecar = serde_json::from_str(
        &fs::read_to_string(&sidecar_path)
            .map_err(|e| Error::Io(format!("{}: {e}", sidecar_path.display())))?,
    )
    .map_err(|e| Error::Io(format!("{}: bad sidecar: {e}", sidecar_path.display())))?;

    let [n1, n2, n3] = sidecar.dims;
    let grid = Grid3::new(n1, n2, n3, l_min)?;
    let mut file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;

    let n = grid.len();
    let c: Vec<f64> = match sidecar.dtype.as_str() {
        "float32" => {
            if bytes.len() != 4 * n {
                return Err(Error::Io(format!(
                    "{}: expected {} float32 values, file has {} bytes",
                    path.display(),
                    n,
                    bytes.len()
                )));
            }
            bytes
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
                .collect()
        }
        "float64" => {
            if bytes.len() != 8 * n {
                return Err(Error::Io(format!(
                    "{}: expected {} float64 values, file has {} bytes",
                    path.display(),
                    n,
                    bytes.len()
                )));
            }
            bytes
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]]))
                .collect()
        }
        other => return Err(Error::Io(format!("unsupported dtype {other:?}"))),
    };
    WavespeedModel::from_wavespeed(grid, &c, sidecar.c_min)
}

/// Writes a float64 wavespeed binary and matching sidecar next to it.
pub fn write_wavespeed_model(path: &Path, dims: [usize; 3], c: &[f64], spacing: f64) -> Result<()> {
    if c.len() != dims[0] * dims[1] * dims[2] {
        return Err(Error::DimensionMismatch {
            expected: dims[0] * dims[1] * dims[2],
            got: c.len(),
            context: "wavespeed write",
        });
    }
    let c_min = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let c_max = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sidecar = WavespeedSidecar { dims, dtype: "float64".into(), c_min, c_max, spacing };
    let mut bytes = Vec::with_capacity(8 * c.len());
    for &v in c {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let sc = sidecar_path_for(path);
    fs::write(&sc, serde_json::to_string_pretty(&sidecar).expect("sidecar serializes"))
        .map_err(|e| Error::Io(format!("{}: {e}", sc.display())))?;
    Ok(())
}

fn sidecar_path_for(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    std::path::PathBuf::from(s)
}
