//! Zero set of the cat-state Husimi distribution: the surfaces
//! `α = (j/α_e) ln((1 - z z_e)/(1 + z z_e)) + iπ(2l+1)/(2α_e)`, their images of
//! a regular z grid, and the straight dark fringes of the large-j limit.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::model::Spin;
use crate::variational::Equilibrium;

/// Branch `l` of the zero set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroSurface {
    pub l: i64,
    pub equilibrium: Equilibrium,
    pub spin: Spin,
}

impl ZeroSurface {
    pub fn new(equilibrium: Equilibrium, l: i64) -> Result<Self> {
        if equilibrium.alpha_e == 0.0 {
            return Err(Error::NoZeros);
        }
        Ok(Self {
            l,
            equilibrium,
            spin: equilibrium.params.spin,
        })
    }

    /// `π(2l+1)/(2α_e)`.
    pub fn offset(&self) -> f64 {
        PI * (2 * self.l + 1) as f64 / (2.0 * self.equilibrium.alpha_e)
    }
}

const BRANCH_GUARD: f64 = 1e-12;

/// α on surface `l` above the point `z` (principal branch of the log).
pub fn zero_surface_alpha(s: &ZeroSurface, z: Complex64) -> Result<Complex64> {
    let eq = &s.equilibrium;
    let w = z * eq.z_e;
    let num = Complex64::new(1.0, 0.0) - w;
    let den = Complex64::new(1.0, 0.0) + w;
    if num.norm() < BRANCH_GUARD || den.norm() < BRANCH_GUARD {
        return Err(Error::Singular(format!("z = {z} sits on a branch point 1 ± z z_e = 0")));
    }
    let j = s.spin.j();
    Ok(j / eq.alpha_e * (num / den).ln() + Complex64::new(0.0, s.offset()))
}

/// Rectangle in the z plane swept by lines of constant `Re z` and `Im z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    /// Lines per family.
    pub lines: usize,
    /// Samples along each line.
    pub samples: usize,
}

impl Default for ZGrid {
    fn default() -> Self {
        Self {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
            lines: 21,
            samples: 201,
        }
    }
}

impl ZGrid {
    fn validate(&self) -> Result<()> {
        let ok = self.re_max > self.re_min && self.im_max > self.im_min && self.lines >= 2 && self.samples >= 2;
        if !ok
            || ![self.re_min, self.re_max, self.im_min, self.im_max]
                .iter()
                .all(|x| x.is_finite())
        {
            return Err(Error::Validation(
                "z grid must be a non-empty rectangle with >= 2 lines and samples".into(),
            ));
        }
        Ok(())
    }
}

fn lin(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Image of `Re z = const`.
    Vertical,
    /// Image of `Im z = const`.
    Horizontal,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Vertical => "vertical",
            Family::Horizontal => "horizontal",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub z: Complex64,
    pub alpha: Complex64,
}

/// One unbroken polyline; a grid line cut by the log branch gives several.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub family: Family,
    pub line_id: usize,
    pub points: Vec<CurvePoint>,
}

/// Images of the grid lines under [`zero_surface_alpha`], split wherever
/// `Im α` jumps by more than half the `2πj/|α_e|` period of the log.
pub fn conformal_grid(s: &ZeroSurface, grid: &ZGrid) -> Result<Vec<Curve>> {
    grid.validate()?;
    let jump = PI * s.spin.j() / s.equilibrium.alpha_e.abs();
    let lines: Vec<(Family, usize)> = [Family::Vertical, Family::Horizontal]
        .into_iter()
        .flat_map(|f| (0..grid.lines).map(move |i| (f, i)))
        .collect();
    let per_line: Vec<Vec<Curve>> = lines
        .par_iter()
        .map(|&(family, id)| {
            let mut curves = Vec::new();
            let mut current: Vec<CurvePoint> = Vec::new();
            for k in 0..grid.samples {
                let z = match family {
                    Family::Vertical => Complex64::new(
                        lin(grid.re_min, grid.re_max, grid.lines, id),
                        lin(grid.im_min, grid.im_max, grid.samples, k),
                    ),
                    Family::Horizontal => Complex64::new(
                        lin(grid.re_min, grid.re_max, grid.samples, k),
                        lin(grid.im_min, grid.im_max, grid.lines, id),
                    ),
                };
                let alpha = zero_surface_alpha(s, z)?;
                if let Some(prev) = current.last() {
                    if (alpha.im - prev.alpha.im).abs() > jump {
                        curves.push(Curve {
                            family,
                            line_id: id,
                            points: std::mem::take(&mut current),
                        });
                    }
                }
                current.push(CurvePoint { z, alpha });
            }
            curves.push(Curve {
                family,
                line_id: id,
                points: current,
            });
            Ok(curves)
        })
        .collect::<Result<_>>()?;
    Ok(per_line.into_iter().flatten().collect())
}

/// CSV `family,line_id,re_alpha,im_alpha,re_z,im_z`; segments of one split
/// line share its `line_id` and are separated by a blank line.
pub fn write_curves_csv<W: Write>(curves: &[Curve], mut w: W) -> Result<()> {
    writeln!(w, "family,line_id,re_alpha,im_alpha,re_z,im_z")?;
    let mut prev: Option<(Family, usize)> = None;
    for c in curves {
        if prev == Some((c.family, c.line_id)) {
            writeln!(w)?;
        }
        prev = Some((c.family, c.line_id));
        for p in &c.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.family.as_str(),
                c.line_id,
                fmt_f64(p.alpha.re),
                fmt_f64(p.alpha.im),
                fmt_f64(p.z.re),
                fmt_f64(p.z.im)
            )?;
        }
    }
    Ok(())
}

/// Dark fringe `α = slope·β + intercept` with `β = √(2j) z`, in the position
/// (`Re`) and momentum (`Im`) planes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeLine {
    pub l: i64,
    pub slope: f64,
    pub intercept_position: f64,
    pub intercept_momentum: f64,
}

/// Slope `-β_e/α_e` and momentum intercept `π(2l+1)/(2α_e)`, `β_e = √(2j) z_e`.
pub fn fringe_lines(eq: &Equilibrium, spin: Spin, l: i64) -> Result<FringeLine> {
    let s = ZeroSurface::new(*eq, l)?;
    let beta_e = (2.0 * spin.j()).sqrt() * eq.z_e;
    Ok(FringeLine {
        l,
        slope: -beta_e / eq.alpha_e,
        intercept_position: 0.0,
        intercept_momentum: s.offset(),
    })
}

/// Number of fringes whose momentum intercept lies in `[-half_width, half_width]`.
pub fn fringe_count(eq: &Equilibrium, half_width: f64) -> Result<usize> {
    if eq.alpha_e == 0.0 {
        return Err(Error::NoZeros);
    }
    // |π(2l+1)/(2α_e)| ≤ w  ⇔  |2l+1| ≤ 2w|α_e|/π
    let bound = 2.0 * half_width * eq.alpha_e.abs() / PI;
    let odd = if bound < 1.0 {
        0
    } else {
        ((bound - 1.0) / 2.0).floor() as usize + 1
    };
    Ok(2 * odd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::PhasePoint;
    use crate::model::ModelParams;
    use crate::variational::{equilibrium_minimize, husimi_variational, CatState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eq(lambda: f64, j: f64) -> Equilibrium {
        equilibrium_minimize(&ModelParams::resonant(lambda, j).unwrap()).unwrap()
    }

    #[test]
    fn origin_image_and_normal_phase() {
        let s = ZeroSurface::new(eq(1.0, 10.0), 0).unwrap();
        let a = zero_surface_alpha(&s, Complex64::new(0.0, 0.0)).unwrap();
        assert!(a.re.abs() < 1e-15);
        assert!((a.im + 0.362_759_872_846_843_6).abs() < 1e-8);
        assert!(matches!(ZeroSurface::new(eq(0.3, 10.0), 0), Err(Error::NoZeros)));
        let z_branch = Complex64::new(1.0 / s.equilibrium.z_e, 0.0);
        assert!(matches!(zero_surface_alpha(&s, z_branch), Err(Error::Singular(_))));
    }

    #[test]
    fn surfaces_are_zeros_of_the_cat() {
        let e = eq(1.0, 10.0);
        let cat = CatState::even(&e).unwrap();
        let peak = husimi_variational(&cat, PhasePoint::real(e.alpha_e, e.z_e));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for l in -2..3 {
            let s = ZeroSurface::new(e, l).unwrap();
            for _ in 0..100 {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let a = zero_surface_alpha(&s, z).unwrap();
                let v = husimi_variational(&cat, PhasePoint::new(a, z));
                assert!(v <= 1e-18 * peak, "l = {l}, z = {z}: {v}");
            }
        }
    }

    #[test]
    fn branches_pair_under_conjugation() {
        let e = eq(0.9, 4.0);
        let z = Complex64::new(0.3, -0.6);
        for l in -3..3 {
            let a = zero_surface_alpha(&ZeroSurface::new(e, l).unwrap(), z).unwrap();
            let b = zero_surface_alpha(&ZeroSurface::new(e, -l - 1).unwrap(), z.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn small_z_follows_fringe_line() {
        let e = eq(1.0, 50.0);
        let spin = e.params.spin;
        let f = fringe_lines(&e, spin, 1).unwrap();
        let s = ZeroSurface::new(e, 1).unwrap();
        let root = (2.0 * spin.j()).sqrt();
        let mut last = f64::INFINITY;
        for r in [1e-2, 1e-3, 1e-4] {
            let z = Complex64::new(0.6 * r, 0.8 * r);
            let a = zero_surface_alpha(&s, z).unwrap();
            let beta = root * z;
            let pred = Complex64::new(
                f.slope * beta.re + f.intercept_position,
                f.slope * beta.im + f.intercept_momentum,
            );
            let err = (a - pred).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn fringe_examples() {
        let e = eq(1.0, 10.0);
        let f = fringe_lines(&e, e.params.spin, 0).unwrap();
        assert!((f.slope - 0.8).abs() < 1e-9);
        assert!((f.intercept_momentum + 0.362_759_872_846_843_6).abs() < 1e-8);
        assert_eq!(f.intercept_position, 0.0);
        assert!(fringe_lines(&eq(0.3, 10.0), Spin::new(10.0).unwrap(), 0).is_err());
        let window = 3.0;
        assert!(fringe_count(&eq(0.7, 10.0), window).unwrap() < fringe_count(&eq(1.2, 10.0), window).unwrap());
        assert!(fringe_count(&eq(1.0, 3.0), window).unwrap() < fringe_count(&eq(1.0, 20.0), window).unwrap());
    }

    #[test]
    fn fringe_count_matches_enumeration() {
        let e = eq(1.1, 6.0);
        for w in [0.1, 0.5, 1.7, 4.0] {
            let manual = (-100..100)
                .filter(|&l| fringe_lines(&e, e.params.spin, l).unwrap().intercept_momentum.abs() <= w)
                .count();
            assert_eq!(fringe_count(&e, w).unwrap(), manual);
        }
    }

    #[test]
    fn conformal_grid_structure() {
        let s = ZeroSurface::new(eq(1.0, 10.0), 0).unwrap();
        let curves = conformal_grid(&s, &ZGrid::default()).unwrap();
        let real_axis = curves
            .iter()
            .find(|c| c.family == Family::Horizontal && c.line_id == 10)
            .unwrap();
        for p in &real_axis.points {
            assert!(p.z.im.abs() < 1e-15);
            assert!((p.alpha.im - s.offset()).abs() < 1e-12);
        }
        // z → -z maps α → 2i·offset - α
        let grid = ZGrid::default();
        for line in 0..grid.lines {
            let a = curves
                .iter()
                .find(|c| c.family == Family::Vertical && c.line_id == line)
                .unwrap();
            let b = curves
                .iter()
                .find(|c| c.family == Family::Vertical && c.line_id == grid.lines - 1 - line)
                .unwrap();
            for (p, q) in a.points.iter().zip(b.points.iter().rev()) {
                let mirror = Complex64::new(0.0, 2.0 * s.offset()) - q.alpha;
                assert!((p.alpha - mirror).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn branch_cut_splits_polyline() {
        // the cut of the log sits on |Re z| > 1/z_e; sweep across it
        let s = ZeroSurface::new(eq(1.0, 10.0), 0).unwrap();
        let grid = ZGrid {
            re_min: -3.0,
            re_max: 3.0,
            im_min: -0.5,
            im_max: 0.5,
            lines: 3,
            samples: 101,
        };
        let curves = conformal_grid(&s, &grid).unwrap();
        let pieces = curves
            .iter()
            .filter(|c| c.family == Family::Vertical && c.line_id == 0)
            .count();
        assert_eq!(pieces, 2);
        let mut out = Vec::new();
        write_curves_csv(&curves, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("family,line_id,re_alpha,im_alpha,re_z,im_z\n"));
        assert!(text.contains("\n\n"));
    }
}
