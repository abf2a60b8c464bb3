//! Dormand–Prince 5(4) with step-size control and dense output.

use crate::real::{lit, Real};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy)]
pub struct DopriOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h_init: Option<T>,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Default for DopriOptions<T> {
    fn default() -> Self {
        Self { rtol: lit(1e-10), atol: lit(1e-12), h_init: None, h_max: T::infinity(), max_steps: 200_000 }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct Step<T, const N: usize> {
    pub x0: T,
    pub x1: T,
    pub y0: [T; N],
    pub y1: [T; N],
    rcont: [[T; N]; 4],
}

impl<T: Real, const N: usize> Step<T, N> {
    pub fn h(&self) -> T {
        self.x1 - self.x0
    }

    fn s(&self, x: T) -> T {
        (x - self.x0) / self.h()
    }

    /// Dense-output state at x in [x0, x1].
    pub fn dense(&self, x: T) -> [T; N] {
        let s = self.s(x);
        let s1 = T::one() - s;
        let r = &self.rcont;
        std::array::from_fn(|i| self.y0[i] + s * (r[0][i] + s1 * (r[1][i] + s * (r[2][i] + s1 * r[3][i]))))
    }

    /// Derivative of the dense output at x.
    pub fn dense_derivative(&self, x: T) -> [T; N] {
        let s = self.s(x);
        let s1 = T::one() - s;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let r = &self.rcont;
        let h = self.h();
        std::array::from_fn(|i| {
            (r[0][i]
                + (T::one() - two * s) * r[1][i]
                + s * (two - three * s) * r[2][i]
                + two * s * s1 * (T::one() - two * s) * r[3][i])
                / h
        })
    }
}

/// Returned by the observer after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Reached `x_end`.
    Finished,
    /// The observer asked to stop.
    Stopped,
    MaxSteps,
    /// Step size underflowed without satisfying the error test.
    StepTooSmall,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<T, const N: usize> {
    pub termination: Termination,
    pub x: T,
    pub y: [T; N],
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[([T; N], f64)]) -> [T; N] {
    std::array::from_fn(|i| {
        let mut acc = T::zero();
        for (k, c) in terms {
            if *c != 0.0 {
                acc = acc + k[i] * lit(*c);
            }
        }
        y[i] + h * acc
    })
}

fn wrms<T: Real, const N: usize>(v: &[T; N], y0: &[T; N], y1: &[T; N], opts: &DopriOptions<T>) -> T {
    let mut s = T::zero();
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        let r = v[i] / sc;
        s = s + r * r;
    }
    (s / lit(N as f64)).sqrt()
}

/// Integrates y′ = f(x, y) from `x0` toward `x_end` (either direction).
///
/// `f` may fail, e.g. when a stage leaves the domain of the right-hand side;
/// the step is then retried with a quarter of the step size, and the error
/// is returned only once the step size underflows. `observe` sees every
/// accepted step and may stop the integration.
pub fn integrate<T, const N: usize, E, F, O>(
    mut f: F,
    x0: T,
    y0: [T; N],
    x_end: T,
    opts: &DopriOptions<T>,
    mut observe: O,
) -> Result<Outcome<T, N>, E>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
    O: FnMut(&Step<T, N>) -> Control,
{
    let dir = if x_end >= x0 { T::one() } else { -T::one() };
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y)?;
    let span = (x_end - x0).abs();
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => initial_step(&mut f, x, &y, &k1, dir, opts)?,
    }
    .min(opts.h_max)
    .min(span);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_err: Option<E> = None;
    let beta = lit::<T>(0.04);
    let mut err_old = lit::<T>(1e-4);

    loop {
        if (x_end - x) * dir <= T::zero() {
            return Ok(Outcome { termination: Termination::Finished, x, y, accepted, rejected });
        }
        if accepted >= opts.max_steps {
            return Ok(Outcome { termination: Termination::MaxSteps, x, y, accepted, rejected });
        }
        let h_min = lit::<T>(16.0) * T::epsilon() * x.abs().max(T::one());
        if h < h_min {
            return match last_err {
                Some(e) => Err(e),
                None => Ok(Outcome { termination: Termination::StepTooSmall, x, y, accepted, rejected }),
            };
        }
        let last = (x + dir * h - x_end) * dir >= T::zero();
        let hs = if last { (x_end - x) * dir } else { h } * dir;

        let stages = (|| {
            let k2 = f(x + hs * lit(C[1]), &axpy(&y, hs, &[(k1, A[1][0])]))?;
            let k3 = f(x + hs * lit(C[2]), &axpy(&y, hs, &[(k1, A[2][0]), (k2, A[2][1])]))?;
            let k4 = f(x + hs * lit(C[3]), &axpy(&y, hs, &[(k1, A[3][0]), (k2, A[3][1]), (k3, A[3][2])]))?;
            let k5 =
                f(x + hs * lit(C[4]), &axpy(&y, hs, &[(k1, A[4][0]), (k2, A[4][1]), (k3, A[4][2]), (k4, A[4][3])]))?;
            let k6 =
                f(x + hs, &axpy(&y, hs, &[(k1, A[5][0]), (k2, A[5][1]), (k3, A[5][2]), (k4, A[5][3]), (k5, A[5][4])]))?;
            let y1 = axpy(&y, hs, &[(k1, A[6][0]), (k3, A[6][2]), (k4, A[6][3]), (k5, A[6][4]), (k6, A[6][5])]);
            let k7 = f(x + hs, &y1)?;
            Ok([k2, k3, k4, k5, k6, k7, y1])
        })();
        let [k2, k3, k4, k5, k6, k7, y1] = match stages {
            Ok(v) => v,
            Err(e) => {
                last_err = Some(e);
                h = h * lit(0.25);
                rejected += 1;
                continue;
            }
        };
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let err_vec: [T; N] = std::array::from_fn(|i| {
            let mut acc = T::zero();
            for (j, k) in ks.iter().enumerate() {
                acc = acc + k[i] * lit(E[j]);
            }
            hs * acc
        });
        let err = wrms(&err_vec, &y, &y1, opts);
        if !err.is_finite() {
            h = h * lit(0.25);
            rejected += 1;
            continue;
        }
        if err <= T::one() {
            let r2: [T; N] = std::array::from_fn(|i| y1[i] - y[i]);
            let r3: [T; N] = std::array::from_fn(|i| hs * k1[i] - r2[i]);
            let r4: [T; N] = std::array::from_fn(|i| r2[i] - hs * k7[i] - r3[i]);
            let r5: [T; N] = std::array::from_fn(|i| {
                let mut acc = T::zero();
                for (j, k) in ks.iter().enumerate() {
                    acc = acc + k[i] * lit(D[j]);
                }
                hs * acc
            });
            let step = Step { x0: x, x1: x + hs, y0: y, y1, rcont: [r2, r3, r4, r5] };
            x = if last { x_end } else { x + hs };
            y = y1;
            k1 = k7;
            accepted += 1;
            last_err = None;
            // PI step-size controller
            let e = err.max(lit(1e-10));
            let fac = lit::<T>(0.9) * e.powf(lit(-0.2 + 0.75 * 0.04)) * err_old.powf(beta);
            err_old = e.max(lit(1e-4));
            h = (h * fac.max(lit(0.2)).min(lit(10.0))).min(opts.h_max);
            if observe(&step) == Control::Stop {
                return Ok(Outcome { termination: Termination::Stopped, x, y, accepted, rejected });
            }
        } else {
            let fac = lit::<T>(0.9) * err.powf(lit(-0.2));
            h = h * fac.max(lit(0.2)).min(T::one());
            rejected += 1;
        }
    }
}

/// Initial step heuristic (Hairer, Nørsett & Wanner, II.4).
fn initial_step<T, const N: usize, E, F>(
    f: &mut F,
    x: T,
    y: &[T; N],
    k1: &[T; N],
    dir: T,
    opts: &DopriOptions<T>,
) -> Result<T, E>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N], E>,
{
    let d0 = wrms(y, y, y, opts);
    let d1 = wrms(k1, y, y, opts);
    let tiny = lit::<T>(1e-5);
    let h0 = if d0 < tiny || d1 < tiny { lit(1e-6) } else { lit::<T>(0.01) * d0 / d1 };
    let h0 = h0.min(opts.h_max);
    let y1: [T; N] = std::array::from_fn(|i| y[i] + dir * h0 * k1[i]);
    let k2 = match f(x + dir * h0, &y1) {
        Ok(k) => k,
        Err(_) => return Ok(h0 * lit(0.01)),
    };
    let diff: [T; N] = std::array::from_fn(|i| k2[i] - k1[i]);
    let d2 = wrms(&diff, y, y, opts) / h0;
    let m = d1.max(d2);
    let h1 = if m <= lit(1e-15) { (h0 * lit(1e-3)).max(lit(1e-6)) } else { (lit::<T>(0.01) / m).powf(lit(0.2)) };
    Ok((h0 * lit(100.0)).min(h1))
}
