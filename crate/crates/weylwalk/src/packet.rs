//! Gaussian wave-packet evolution on a periodic momentum grid: the
//! state-level view of the n-step convergence bound.
//!
//! The packet lives on a ring/torus of `sites` points per dimension. Both
//! evolutions (the walk U(p)ⁿ and the continuum e^{−iH(p)t}) act diagonally
//! in momentum space; position observables are read off after an inverse
//! DFT. Sum reductions run in a fixed serial order so traces are
//! reproducible bit-for-bit regardless of thread count.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::continuum::BMatrices;
use crate::error::WalkError;
use crate::linalg;
use crate::walk::WalkSpec;

/// A Gaussian packet: position center, mean momentum, real-space width and
/// internal state.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub center: Vec<f64>,
    pub momentum: Vec<f64>,
    pub width: f64,
    pub internal: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct PacketSample {
    pub step: u64,
    pub time: f64,
    /// Mean position of the discrete evolution.
    pub mean: Vec<f64>,
    pub spread: f64,
    /// Mean position of the continuum evolution.
    pub mean_continuum: Vec<f64>,
    pub spread_continuum: f64,
}

#[derive(Debug, Clone)]
pub struct PacketTrace {
    pub samples: Vec<PacketSample>,
    /// L2 distance between the two final states.
    pub final_distance: f64,
    /// Packet weight at momenta |p| > Λ, when a cutoff was supplied.
    pub out_of_band: Option<f64>,
    /// Worst deviation of either state's norm from 1 over the run.
    pub norm_drift: f64,
}

impl PacketTrace {
    /// Mean velocity of the discrete evolution over the whole run, per unit
    /// time.
    pub fn mean_velocity(&self) -> Vec<f64> {
        let first = &self.samples[0];
        let last = &self.samples[self.samples.len() - 1];
        let dt = last.time - first.time;
        first
            .mean
            .iter()
            .zip(&last.mean)
            .map(|(a, b)| (b - a) / dt)
            .collect()
    }
}

/// Evolve `packet` for `steps` timesteps under both the walk and its
/// continuum Hamiltonian on a periodic grid of `sites` points per dimension.
pub fn evolve_packet(
    spec: &WalkSpec,
    bm: &BMatrices,
    packet: &WavePacket,
    steps: u64,
    sites: usize,
    lambda: Option<f64>,
) -> Result<PacketTrace, WalkError> {
    let d = spec.dim();
    let k = spec.internal_dim();
    let a = spec.scale().a;
    let dt = spec.scale().dt;
    if packet.width < 5.0 * a {
        return Err(WalkError::PacketTooNarrow { sigma: packet.width, a, min_sites: 10 });
    }
    if (sites as f64) * a < 20.0 * packet.width {
        return Err(WalkError::BoxTooSmall { sites, a, needed: 20.0 * packet.width });
    }
    if packet.internal.len() != k {
        return Err(WalkError::InternalStateDimension { expected: k, found: packet.internal.len() });
    }
    if packet.momentum.len() != d || packet.center.len() != d {
        return Err(WalkError::MomentumDimension {
            expected: d,
            found: packet.momentum.len().max(packet.center.len()),
        });
    }

    let total: usize = sites.pow(d as u32);
    // momentum per site index along one axis (DFT frequency convention)
    let p_axis: Vec<f64> = (0..sites)
        .map(|j| {
            let f = if j <= sites / 2 { j as i64 } else { j as i64 - sites as i64 };
            2.0 * std::f64::consts::PI * f as f64 / (sites as f64 * a)
        })
        .collect();

    // normalized internal state
    let inorm = packet.internal.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let chi: Vec<C64> = packet.internal.iter().map(|z| z / inorm).collect();

    // Gaussian momentum amplitude, normalized on the grid.
    let mut amp = vec![C64::new(0.0, 0.0); total];
    let mut idx = vec![0usize; d];
    for site in 0..total {
        let mut g = 1.0f64;
        let mut phase = 0.0f64;
        for i in 0..d {
            let p = p_axis[idx[i]];
            let dp = p - packet.momentum[i];
            g *= (-packet.width * packet.width * dp * dp).exp();
            phase -= p * packet.center[i];
        }
        amp[site] = C64::from_polar(g, phase);
        increment(&mut idx, sites);
    }
    let total_weight: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
    let scale_amp = 1.0 / total_weight.sqrt();
    for z in amp.iter_mut() {
        *z *= scale_amp;
    }

    let out_of_band = lambda.map(|lam| {
        let mut w = 0.0;
        let mut idx = vec![0usize; d];
        for z in amp.iter() {
            let p2: f64 = idx.iter().map(|&j| p_axis[j] * p_axis[j]).sum();
            if p2 > lam * lam {
                w += z.norm_sqr();
            }
            increment(&mut idx, sites);
        }
        w
    });

    // site-major, k components per site
    let mut disc: Vec<C64> = Vec::with_capacity(total * k);
    for z in &amp {
        for c in &chi {
            disc.push(z * c);
        }
    }
    let mut cont = disc.clone();

    let coins: Vec<(Vec<f64>, Vec<C64>)> = spec
        .coins()
        .iter()
        .map(|(q, m)| {
            (
                q.iter().map(|&x| x as f64).collect(),
                m.iter().cloned().collect(),
            )
        })
        .collect();
    let b_flat: Vec<Vec<C64>> = bm.b.iter().map(|m| m.iter().cloned().collect()).collect();
    let mass_flat: Option<Vec<C64>> = bm.mass.as_ref().map(|m| m.iter().cloned().collect());

    let mut fft = SpectralGrid::new(d, sites, k);
    let mut samples = Vec::with_capacity(steps as usize + 1);
    let mut norm_drift = 0.0f64;

    for step in 0..=steps {
        let (mean_d, spread_d, norm_d) = fft.position_stats(&disc, a);
        let (mean_c, spread_c, norm_c) = fft.position_stats(&cont, a);
        norm_drift = norm_drift.max((norm_d - 1.0).abs()).max((norm_c - 1.0).abs());
        samples.push(PacketSample {
            step,
            time: step as f64 * dt,
            mean: mean_d,
            spread: spread_d,
            mean_continuum: mean_c,
            spread_continuum: spread_c,
        });
        if step == steps {
            break;
        }
        step_states(
            &mut disc, &mut cont, &coins, &b_flat, &mass_flat, &p_axis, d, k, a, dt, sites,
        );
    }

    let final_distance = disc
        .iter()
        .zip(&cont)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();

    Ok(PacketTrace { samples, final_distance, out_of_band, norm_drift })
}

fn increment(idx: &mut [usize], sites: usize) {
    for j in (0..idx.len()).rev() {
        idx[j] += 1;
        if idx[j] < sites {
            return;
        }
        idx[j] = 0;
    }
}

/// One timestep of both evolutions, applied pointwise in momentum space.
#[allow(clippy::too_many_arguments)]
fn step_states(
    disc: &mut [C64],
    cont: &mut [C64],
    coins: &[(Vec<f64>, Vec<C64>)],
    b_flat: &[Vec<C64>],
    mass_flat: &Option<Vec<C64>>,
    p_axis: &[f64],
    d: usize,
    k: usize,
    a: f64,
    dt: f64,
    sites: usize,
) {
    disc.par_chunks_mut(k)
        .zip(cont.par_chunks_mut(k))
        .enumerate()
        .for_each(|(site, (dvec, cvec))| {
            let mut p = [0.0f64; 3];
            let mut rem = site;
            for i in (0..d).rev() {
                p[i] = p_axis[rem % sites];
                rem /= sites;
            }
            // walk symbol U(p) = Σ_q A_q e^{−i a q·p}
            let mut u = [C64::new(0.0, 0.0); 16];
            for (q, m) in coins {
                let qp: f64 = q.iter().zip(&p[..d]).map(|(qi, pi)| qi * pi).sum();
                let phase = C64::from_polar(1.0, -a * qp);
                for (dst, src) in u[..k * k].iter_mut().zip(m) {
                    *dst += phase * src;
                }
            }
            apply(&u[..k * k], dvec, k);
            // continuum step e^{−iH(p)dt}
            let mut h = [C64::new(0.0, 0.0); 16];
            if let Some(m) = mass_flat {
                h[..k * k].copy_from_slice(m);
            }
            for (i, b) in b_flat.iter().enumerate() {
                for (dst, src) in h[..k * k].iter_mut().zip(b) {
                    *dst += p[i] * src;
                }
            }
            let e = hermitian_exp(&h[..k * k], k, dt);
            apply(&e, cvec, k);
        });
}

fn apply(m: &[C64], v: &mut [C64], k: usize) {
    let mut out = [C64::new(0.0, 0.0); 4];
    for r in 0..k {
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..k {
            acc += m[r * k + c] * v[c];
        }
        out[r] = acc;
    }
    v.copy_from_slice(&out[..k]);
}

/// e^{−i h t} for a Hermitian matrix given row-major; closed form for k = 2,
/// eigendecomposition otherwise.
fn hermitian_exp(h: &[C64], k: usize, t: f64) -> Vec<C64> {
    if k == 2 {
        let c0 = 0.5 * (h[0].re + h[3].re);
        let vx = h[1].re; // ½tr(σ_x H) = Re h01
        let vy = h[1].im * -1.0; // ½tr(σ_y H) = −Im h01... careful below
        let vz = 0.5 * (h[0].re - h[3].re);
        // H = c0 + vx σ_x + vy σ_y + vz σ_z with h01 = vx − i vy
        let vn = (vx * vx + vy * vy + vz * vz).sqrt();
        let phase = C64::from_polar(1.0, -c0 * t);
        let (cs, sn) = ((vn * t).cos(), (vn * t).sin());
        let f = if vn > 0.0 { sn / vn } else { t };
        let i = C64::i();
        return vec![
            phase * (C64::new(cs, 0.0) - i * f * vz),
            phase * (-i * f * C64::new(vx, -vy)),
            phase * (-i * f * C64::new(vx, vy)),
            phase * (C64::new(cs, 0.0) + i * f * vz),
        ];
    }
    let arr = ndarray::Array2::from_shape_vec((k, k), h.to_vec()).unwrap();
    linalg::expm_i_hermitian(&arr, t).iter().cloned().collect()
}

/// Inverse-DFT scratch machinery for position-space statistics.
struct SpectralGrid {
    d: usize,
    sites: usize,
    k: usize,
    planner_scratch: std::sync::Arc<dyn rustfft::Fft<f64>>,
    buf: Vec<C64>,
}

impl SpectralGrid {
    fn new(d: usize, sites: usize, k: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(sites);
        SpectralGrid { d, sites, k, planner_scratch: fft, buf: Vec::new() }
    }

    /// Mean position, spread and total norm of a momentum-space state.
    ///
    /// Coordinates wrap to (−Na/2, Na/2]; packets are expected to stay well
    /// inside the box.
    fn position_stats(&mut self, state: &[C64], a: f64) -> (Vec<f64>, f64, f64) {
        let total = self.sites.pow(self.d as u32);
        // inverse DFT per component
        self.buf.clear();
        self.buf.extend_from_slice(state);
        let n = self.sites;
        let mut scratch = vec![C64::new(0.0, 0.0); self.planner_scratch.get_inplace_scratch_len()];
        let mut line = vec![C64::new(0.0, 0.0); n];
        for axis in 0..self.d {
            // stride between consecutive entries along `axis` (site-major with
            // k components per site, last axis fastest)
            let mut stride = self.k;
            for _ in axis + 1..self.d {
                stride *= n;
            }
            let lines = total * self.k / n;
            for l in 0..lines {
                // decompose line id into (block, offset within stride)
                let block = l / stride;
                let offset = l % stride;
                let base = block * stride * n + offset;
                for j in 0..n {
                    line[j] = self.buf[base + j * stride];
                }
                self.planner_scratch.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    self.buf[base + j * stride] = line[j];
                }
            }
        }
        let norm_factor = 1.0 / (total as f64).sqrt();
        let half = (n / 2) as i64;
        let mut mean = vec![0.0f64; self.d];
        let mut norm = 0.0f64;
        let mut idx = vec![0usize; self.d];
        let mut coords: Vec<Vec<f64>> = Vec::new();
        let coord_axis: Vec<f64> = (0..n)
            .map(|j| {
                let c = j as i64;
                let wrapped = if c > half { c - n as i64 } else { c };
                wrapped as f64 * a
            })
            .collect();
        coords.push(coord_axis);
        for site in 0..total {
            let mut prob = 0.0;
            for c in 0..self.k {
                prob += (self.buf[site * self.k + c] * norm_factor).norm_sqr();
            }
            for i in 0..self.d {
                mean[i] += prob * coords[0][idx[i]];
            }
            norm += prob;
            increment(&mut idx, n);
        }
        for m in mean.iter_mut() {
            *m /= norm;
        }
        let mut var = 0.0f64;
        let mut idx = vec![0usize; self.d];
        for site in 0..total {
            let mut prob = 0.0;
            for c in 0..self.k {
                prob += (self.buf[site * self.k + c] * norm_factor).norm_sqr();
            }
            let mut r2 = 0.0;
            for i in 0..self.d {
                let dx = coords[0][idx[i]] - mean[i];
                r2 += dx * dx;
            }
            var += prob * r2;
            increment(&mut idx, n);
        }
        (mean, (var / norm).sqrt(), norm)
    }
}
