use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use loopstar::current::{
    build_truncation, commutator_defect, deform, deform_signed, deformed_block, hs_norm_comparison, hs_norm_comparison_signed, hs_trend_gaps,
    lundberg_cocycle, BlockOperator, CurrentOperator, DeformationSign, OneDimModel,
};
use loopstar::determinant::{
    det_unipotent, exponential_path, group_cocycle_extract, lie_cocycle, linear_exponential_path, log_det, mod_two_pi_i, DetSettings,
    LoopAlgebraElement,
};
use loopstar::disk::builders::{angular_mode, interior_element};
use loopstar::disk::random::{random_boundary_constant, random_boundary_identity, random_map, random_matrix, random_polynomial, random_series, random_su, seeded_rng};
use loopstar::disk::{DiskAlgebra, StarElement};
use loopstar::higher_dim::{loop_cocycle_s, su2_irrep, CocycleNormalization, MatrixLoop};
use loopstar::jets::{BumpProfile, LoopFamily, SmoothMap};
use loopstar::series::NuSeries;
use loopstar::topology::{su2_generator_loop, winding_via_determinant, wzw_integral, GLoop};
use loopstar::{MatrixNC, Result, C64};
use rand::Rng;

use crate::config::RunConfig;
use crate::report::{Check, Suite, Table};

/// Command parameters that are not part of the run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub repeats: Vec<i32>,
    pub max_mode: i32,
    pub eps: Vec<f64>,
    pub max_twice_j: u32,
    pub fuzzy_spin: f64,
    pub cutoffs: Vec<usize>,
    pub defect_cutoffs: Vec<usize>,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            repeats: vec![1, 2],
            max_mode: 3,
            eps: vec![0.1, 0.2, 0.3],
            max_twice_j: 20,
            fuzzy_spin: 1.0,
            cutoffs: vec![1, 2, 3, 4],
            defect_cutoffs: vec![3, 4, 5],
        }
    }
}

type SuiteFn = Box<dyn Fn(&RunConfig, &Params) -> Vec<Check> + Send + Sync>;
type TableSuiteFn = Box<dyn Fn(&RunConfig, &Params) -> (Vec<Check>, Vec<Table>) + Send + Sync>;

/// A named suite producing checks and tables.
pub struct SuiteDef {
    pub name: String,
    run: TableSuiteFn,
    parameters: fn(&Params) -> BTreeMap<String, String>,
}

impl SuiteDef {
    fn checks(name: &str, f: SuiteFn) -> Self {
        Self { name: name.into(), run: Box::new(move |c, p| (f(c, p), Vec::new())), parameters: |_| BTreeMap::new() }
    }

    fn with_tables(name: &str, f: impl Fn(&RunConfig, &Params) -> (Vec<Check>, Vec<Table>) + Send + Sync + 'static) -> Self {
        Self { name: name.into(), run: Box::new(f), parameters: |_| BTreeMap::new() }
    }

    fn parameters(mut self, p: fn(&Params) -> BTreeMap<String, String>) -> Self {
        self.parameters = p;
        self
    }

    pub fn run(&self, config: &RunConfig, params: &Params) -> Suite {
        let start = Instant::now();
        let (checks, tables) = (self.run)(config, params);
        let pass = checks.iter().all(|c| c.pass);
        Suite {
            name: self.name.clone(),
            parameters: (self.parameters)(params),
            checks,
            tables,
            pass,
            wall_clock_s: crate::report::Real(start.elapsed().as_secs_f64()),
        }
    }
}

/// Runs `f`, turning an engine error into a failed check.
fn guarded(name: &str, tol: f64, f: impl FnOnce() -> Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, tol, e))
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn diag_i() -> MatrixNC {
    MatrixNC::diag(&[c(0.0, 1.0), c(0.0, -1.0)])
}

pub fn commands() -> [&'static str; 5] {
    ["disk-verify", "winding", "cocycle", "fuzzy", "deform"]
}

pub fn suites_for(command: &str) -> Vec<SuiteDef> {
    match command {
        "disk-verify" => vec![
            SuiteDef::checks("moyal-kernel", Box::new(|c, _| vec![moyal_kernel(c)])),
            SuiteDef::checks("associativity", Box::new(|c, _| vec![associativity(c)])),
            SuiteDef::checks("boundary-homomorphism", Box::new(|c, _| vec![boundary_homomorphism(c)])),
            SuiteDef::checks("trace-property", Box::new(|c, _| vec![trace_property(c)])),
            SuiteDef::checks("trace-defect", Box::new(|c, _| trace_defect(c))),
            SuiteDef::checks("quadrature-convergence", Box::new(|c, _| vec![quadrature_doubling(c)])),
            SuiteDef::checks("truncation-stability", Box::new(|c, _| vec![truncation_stability(c)])),
        ],
        "winding" => vec![
            SuiteDef::checks("winding-constant", Box::new(|c, _| winding_constant(c))),
            SuiteDef::checks("winding-generator", Box::new(|c, p| winding_generator(c, &p.repeats)))
                .parameters(|p| BTreeMap::from([("repeats".into(), list(&p.repeats))])),
        ],
        "cocycle" => vec![
            SuiteDef::checks("lie-cocycle", Box::new(|c, p| lie_cocycle_suite(c, p.max_mode)))
                .parameters(|p| BTreeMap::from([("max_mode".into(), p.max_mode.to_string())])),
            SuiteDef::checks("group-cocycle", Box::new(|c, p| vec![group_cocycle(c, &p.eps)]))
                .parameters(|p| BTreeMap::from([("eps".into(), list(&p.eps))])),
            SuiteDef::checks("determinant-structure", Box::new(|c, _| determinant_structure(c))),
        ],
        "fuzzy" => vec![SuiteDef::checks("fuzzy", Box::new(|c, p| fuzzy(c, p.max_twice_j, p.fuzzy_spin))).parameters(|p| {
            BTreeMap::from([("max_twice_j".into(), p.max_twice_j.to_string()), ("spin".into(), p.fuzzy_spin.to_string())])
        })],
        "deform" => vec![SuiteDef::with_tables("current-deformation", current_deformation).parameters(|p| {
            BTreeMap::from([("cutoffs".into(), list(&p.cutoffs)), ("defect_cutoffs".into(), list(&p.defect_cutoffs))])
        })],
        "all" => commands().iter().flat_map(|c| suites_for(c)).collect(),
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------- disk

fn moyal_kernel(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.moyal;
    guarded("x*y - y*x = -i nu", tol, || {
        let alg = cfg.algebra();
        let x = alg.zero_order(SmoothMap::x())?;
        let y = alg.zero_order(SmoothMap::y())?;
        let com = alg.star_commutator(&x, &y)?;
        let vals = alg.values_at_nodes(com.series().coeffs())?;
        let mut err: f64 = 0.0;
        for (p, vs) in vals.iter().enumerate() {
            let want = if p == 1 { c(0.0, -1.0) } else { c(0.0, 0.0) };
            err = vs.iter().map(|v| (v[(0, 0)] - want).norm()).fold(err, f64::max);
        }
        Ok(Check::new("x*y - y*x = -i nu", err, tol).reference("canonical commutation", &[("nu1.im", -1.0)]))
    })
}

fn associativity(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.associativity;
    let name = "(f*g)*h = f*(g*h) on 20 random elements";
    guarded(name, tol, || {
        let alg = cfg.algebra();
        let mut rng = seeded_rng(cfg.seed);
        let e = (0..20).map(|_| StarElement::general(random_series(&mut rng, 2, alg.truncation(), 1.0)?)).collect::<Result<Vec<_>>>()?;
        let mut worst: f64 = 0.0;
        for i in 0..e.len() {
            let (f, g, h) = (&e[i], &e[(i + 1) % 20], &e[(i + 2) % 20]);
            let l = alg.star_product(&alg.star_product(f, g)?, h)?;
            let r = alg.star_product(f, &alg.star_product(g, h)?)?;
            worst = worst.max(alg.distance(&l, &r)?);
        }
        Ok(Check::new(name, worst, tol).value("triples", 20.0))
    })
}

fn boundary_homomorphism(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.boundary;
    let name = "boundary value of f*g";
    guarded(name, tol, || {
        let alg = cfg.algebra();
        let prof = cfg.profile();
        let p = MatrixNC::pauli();
        let p0 = MatrixNC::from_real_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]);
        let inner = interior_element(prof, &(&SmoothMap::x() * &SmoothMap::constant(p0)))?;
        let f = alg.zero_order(angular_mode(prof, 1, &p[0])?.try_add(&inner)?)?;
        let g = alg.zero_order(angular_mode(prof, -2, &p[1])?)?;
        let fg = alg.star_product(&f, &g)?;
        let angles = alg.quadrature().boundary_angles();
        let (bf, bg, bfg) = (alg.boundary_values(&f, &angles)?, alg.boundary_values(&g, &angles)?, alg.boundary_values(&fg, &angles)?);
        let mut worst: f64 = 0.0;
        for (k, th) in angles.iter().enumerate() {
            worst = worst.max((&bfg[0][k] - &(&bf[0][k] * &bg[0][k])).max_abs());
            worst = worst.max(bfg[1][k].max_abs());
            // ν²: ¼ ∂_θf ∂_θg for modes 1 and −2
            let expect = (&p[0] * &p[1]).scale(C64::from_polar(0.5, -th));
            worst = worst.max((&bfg[2][k] - &expect).max_abs());
        }
        Ok(Check::new(name, worst, tol).value("angles", angles.len() as f64))
    })
}

fn trace_property(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.trace_property;
    let name = "TR_nu(f*g - g*f) = 0 on 10 boundary-constant pairs";
    guarded(name, tol, || {
        let alg = cfg.algebra();
        let prof = BumpProfile::new(0.0)?;
        let mut rng = seeded_rng(cfg.seed.wrapping_add(1));
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let f = alg.element(random_boundary_constant(&mut rng, prof, 2, alg.truncation(), 1.0)?)?;
            let g = alg.element(random_boundary_constant(&mut rng, prof, 2, alg.truncation(), 1.0)?)?;
            let (lhs, _) = alg.trace_defect(&f, &g)?;
            worst = lhs.coeffs().iter().map(|v| v.norm()).fold(worst, f64::max);
        }
        Ok(Check::new(name, worst, tol).value("pairs", 10.0))
    })
}

fn defect_pair() -> (MatrixNC, MatrixNC) {
    let p = MatrixNC::pauli();
    (&p[0] + &p[2].scale(c(0.0, 1.0)), &p[0] + &MatrixNC::identity(2).scale(c(0.5, 0.0)))
}

/// `(ν⁰ coefficient of TR_ν[f, g], contour value)` for single modes `m`, `−m`.
fn mode_defect(alg: &DiskAlgebra, prof: BumpProfile, m: i32) -> Result<(C64, C64, C64)> {
    let (a, b) = defect_pair();
    let f = alg.zero_order(angular_mode(prof, m, &a)?)?;
    let g = alg.zero_order(angular_mode(prof, -m, &b)?)?;
    let (lhs, rhs) = alg.trace_defect(&f, &g)?;
    Ok((lhs.coeff(0).copied().unwrap_or_default(), lhs.coeff(-1).copied().unwrap_or_default(), rhs))
}

fn trace_defect(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.trace_defect;
    let alg = cfg.algebra();
    let (a, b) = defect_pair();
    let tr_ab = (&a * &b).trace();
    let mut checks = Vec::new();
    let mut by_m: BTreeMap<i32, Vec<C64>> = BTreeMap::new();
    for s0 in [0.1, 0.2, 0.3] {
        for m in 1..=4 {
            let name = format!("m={m} s0={s0}");
            checks.push(guarded(&name, tol, || {
                let (v, laurent, contour) = mode_defect(&alg, BumpProfile::new(s0)?, m)?;
                by_m.entry(m).or_default().push(v);
                let closed = tr_ab * (-m as f64);
                Ok(Check::new(name.clone(), rel(v, contour), tol)
                    .complex("nu0", v)
                    .value("nu_minus_one.abs", laurent.norm())
                    .complex("contour", contour)
                    .reference_complex("closed form -m tr(AB)", "value", closed)
                    .require(laurent.norm() <= tol * closed.norm()))
            }));
        }
    }
    for (m, vs) in &by_m {
        let name = format!("profile invariance m={m}");
        let spread = vs.iter().map(|v| rel(*v, vs[0])).fold(0.0, f64::max);
        checks.push(Check::new(name, spread, cfg.tolerances.profile_invariance).value("profiles", vs.len() as f64).require(vs.len() == 3));
    }
    checks
}

fn quadrature_doubling(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.quadrature_doubling;
    let name = "trace defect m=1 under doubled quadrature";
    guarded(name, tol, || {
        let (v, _, _) = mode_defect(&cfg.algebra(), cfg.profile(), 1)?;
        let (w, _, _) = mode_defect(&cfg.algebra_with(2 * cfg.nr, 2 * cfg.ntheta, cfg.order_k), cfg.profile(), 1)?;
        Ok(Check::new(name, rel(v, w), tol).complex("base", v).complex("doubled", w).flag_on_failure("quadrature-convergence"))
    })
    .flag_on_failure("quadrature-convergence")
}

fn truncation_stability(cfg: &RunConfig) -> Check {
    let tol = cfg.tolerances.truncation_stability;
    let other = if cfg.order_k == 2 { 4 } else { 2 };
    let name = format!("nu0 results at K={} and K={other}", cfg.order_k);
    guarded(&name, tol, || {
        let values = |k: usize| -> Result<Vec<C64>> {
            let alg = cfg.algebra_with(cfg.nr, cfg.ntheta, k);
            let mut out = Vec::new();
            for m in 1..=2 {
                out.push(mode_defect(&alg, cfg.profile(), m)?.0);
            }
            let mut rng = seeded_rng(cfg.seed.wrapping_add(2));
            let f = StarElement::from_order_zero(random_map(&mut rng, 2, 1.0)?, k);
            let g = StarElement::from_order_zero(random_map(&mut rng, 2, 1.0)?, k);
            out.push(alg.trace(&alg.star_product(&f, &g)?)?);
            Ok(out)
        };
        let (a, b) = (values(cfg.order_k)?, values(other)?);
        let worst = a.iter().zip(&b).map(|(x, y)| (x - y).norm() / y.norm().max(1.0)).fold(0.0, f64::max);
        Ok(Check::new(name.clone(), worst, tol).value("K", cfg.order_k as f64).value("K_other", other as f64))
    })
}

// ---------------------------------------------------------------- winding

fn winding_constant(cfg: &RunConfig) -> Vec<Check> {
    let tol = cfg.tolerances.integer;
    vec![guarded("constant loop", tol, || {
        let alg = cfg.algebra();
        let lp = GLoop::constant(2);
        let w = wzw_integral(&alg, &lp)?;
        let d = winding_via_determinant(&alg, &lp, &DetSettings::default())?;
        Ok(Check::new("constant loop", w.abs().max(d.value.norm()), tol).value("wzw", w).complex("winding", d.value).reference("trivial loop", &[("degree", 0.0)]))
    })]
}

fn winding_generator(cfg: &RunConfig, repeats: &[i32]) -> Vec<Check> {
    let alg = cfg.algebra();
    let t = &cfg.tolerances;
    let mut checks = Vec::new();
    for &k in repeats {
        let label = format!("generator x{k}");
        let res = (|| -> Result<(f64, C64, f64)> {
            let lp = su2_generator_loop(cfg.profile())?.traversed(k)?;
            let w = wzw_integral(&alg, &lp)?;
            let d = winding_via_determinant(&alg, &lp, &DetSettings { tol_laurent: t.laurent, ..DetSettings::default() })?;
            Ok((w, d.value, d.laurent))
        })();
        let (w, d, laurent) = match res {
            Ok(v) => v,
            Err(e) => {
                checks.push(Check::failed(format!("{label} wzw"), t.integer, &e));
                checks.push(Check::failed(format!("{label} determinant winding"), t.integer, &e));
                checks.push(Check::failed(format!("{label} agreement"), t.winding_agreement, &e));
                continue;
            }
        };
        let degree = k.unsigned_abs() as f64;
        checks.push(
            Check::new(format!("{label} wzw"), (w - w.round()).abs(), t.integer)
                .value("wzw", w)
                .reference("degree of the traversed generator", &[("abs", degree)])
                .require(w.round().abs() == degree),
        );
        let dr = d.re.round();
        checks.push(
            Check::new(format!("{label} determinant winding"), (d.re - dr).abs().max(d.im.abs()), t.integer)
                .complex("winding", d)
                .value("laurent", laurent)
                .reference("degree of the traversed generator", &[("abs", degree)])
                .require(dr.abs() == degree && laurent <= t.laurent),
        );
        checks.push(Check::new(format!("{label} agreement"), (w.abs() - d.norm()).abs(), t.winding_agreement).value("sign", (w * d.re).signum()));
    }
    checks
}

// ---------------------------------------------------------------- determinant extension

fn lie_cocycle_suite(cfg: &RunConfig, max_mode: i32) -> Vec<Check> {
    let tol = cfg.tolerances.lie_cocycle;
    let alg = cfg.algebra();
    let prof = cfg.profile();
    let mut checks = vec![guarded("reference pair m=2", tol, || {
        let x = LoopAlgebraElement::single(2, diag_i(), prof)?;
        let y = LoopAlgebraElement::single(-2, diag_i(), prof)?;
        let r = lie_cocycle(&alg, &x, &y)?;
        Ok(Check::new("reference pair m=2", rel(r.c_star, c(4.0, 0.0)), tol)
            .complex("c_star", r.c_star)
            .complex("c_boundary", r.c_boundary)
            .reference_complex("contour closed form", "value", c(4.0, 0.0))
            .require((r.closed_form - c(4.0, 0.0)).norm() < 1e-12))
    })];
    let mut rng = seeded_rng(cfg.seed.wrapping_add(3));
    let (a, b) = (random_su(&mut rng, 2, 1.0), random_su(&mut rng, 2, 1.0));
    let name = format!("mode pairs |m|,|k| <= {max_mode}");
    checks.push(guarded(&name, tol, || {
        let (mut worst, mut closed_err): (f64, f64) = (0.0, 0.0);
        for m in -max_mode..=max_mode {
            for k in -max_mode..=max_mode {
                let r = lie_cocycle(&alg, &LoopAlgebraElement::single(m, a.clone(), prof)?, &LoopAlgebraElement::single(k, b.clone(), prof)?)?;
                let expected = if m + k == 0 { (&a * &b).trace() * k as f64 } else { c(0.0, 0.0) };
                let scale = expected.norm().max(1.0);
                worst = worst.max((r.c_star - r.c_boundary).norm() / scale);
                closed_err = closed_err.max((r.closed_form - expected).norm() / scale).max((r.c_boundary - expected).norm() / scale);
            }
        }
        let pairs = (2 * max_mode + 1).pow(2) as f64;
        Ok(Check::new(name.clone(), worst, tol).value("pairs", pairs).value("closed_form_error", closed_err).require(closed_err < 1e-10))
    }));
    let jt = cfg.tolerances.jacobi;
    checks.push(guarded("jacobi", jt, || {
        let mut loops = Vec::new();
        for _ in 0..3 {
            let modes = vec![(-1, random_su(&mut rng, 2, 0.5)), (1, random_su(&mut rng, 2, 0.5)), (2, random_su(&mut rng, 2, 0.5))];
            loops.push(LoopAlgebraElement::new(2, modes, prof)?);
        }
        let (x, y, z) = (&loops[0], &loops[1], &loops[2]);
        let cs = |p: &LoopAlgebraElement, q: &LoopAlgebraElement| lie_cocycle(&alg, p, q).map(|r| r.c_star);
        let terms = [cs(&x.bracket(y)?, z)?, cs(&y.bracket(z)?, x)?, cs(&z.bracket(x)?, y)?];
        let sum = terms[0] + terms[1] + terms[2];
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Ok(Check::new("jacobi", sum.norm(), jt).complex("sum", sum).value("term_scale", scale).require(scale > 1e-3))
    }));
    checks
}

fn group_cocycle(cfg: &RunConfig, eps: &[f64]) -> Check {
    let tol = cfg.tolerances.group_cocycle;
    let name = "commuting pair m=1,-1";
    guarded(name, tol, || {
        let alg = cfg.algebra();
        let prof = cfg.profile();
        let x = LoopAlgebraElement::single(1, diag_i(), prof)?;
        let y = LoopAlgebraElement::single(-1, diag_i(), prof)?;
        let lie = lie_cocycle(&alg, &x, &y)?;
        let g = group_cocycle_extract(&alg, &x, &y, eps, &DetSettings::default())?;
        let mut check = Check::new(name, rel(g.limit, lie.c_star), tol).complex("limit", g.limit).reference_complex("lie cocycle", "c_star", lie.c_star);
        for (e, v) in &g.samples {
            check = check.complex(&format!("eps={e}"), *v);
        }
        Ok(check)
    })
}

/// `χ(u)·Σ p_i(x, y)·iσ_i`: traceless and flat zero at the boundary.
fn interior_traceless(rng: &mut impl Rng, prof: BumpProfile, scale: f64) -> Result<SmoothMap> {
    let terms = MatrixNC::pauli()
        .iter()
        .map(|s| SmoothMap::product(&random_polynomial(rng, 1, 2, scale)?, &SmoothMap::constant(s.scale(c(0.0, 1.0)))))
        .collect::<Result<Vec<_>>>()?;
    interior_element(prof, &SmoothMap::sum(terms)?)
}

fn determinant_structure(cfg: &RunConfig) -> Vec<Check> {
    let t = &cfg.tolerances;
    let alg = cfg.algebra();
    let prof = cfg.profile();
    let settings = DetSettings::default();
    let mut rng = seeded_rng(cfg.seed.wrapping_add(4));
    let mut checks = vec![guarded("unipotent determinant", t.unipotent, || {
        let mut worst: f64 = 0.0;
        for _ in 0..3 {
            let s = random_boundary_identity(&mut rng, prof, 2, alg.truncation(), 0.4)?;
            let mut coeffs = s.coeffs().to_vec();
            coeffs[0] = SmoothMap::identity(2);
            let k = alg.element(NuSeries::new(0, coeffs.clone())?)?;
            let expected = (alg.integrate_traces(&coeffs[1..2])?[0] / (2.0 * PI)).exp();
            worst = worst.max(rel(det_unipotent(&alg, &k)?, expected));
        }
        Ok(Check::new("unipotent determinant", worst, t.unipotent).reference("exp of the first-coefficient trace", &[]))
    })];
    checks.push(guarded("multiplicativity", t.multiplicativity, || {
        let mut make = || -> Result<(StarElement, Arc<LoopFamily>)> {
            let h = interior_traceless(&mut rng, prof, 0.7)?;
            let mut coeffs = vec![h.exp()];
            for _ in 0..alg.truncation() {
                coeffs.push(interior_traceless(&mut rng, prof, 0.5)?);
            }
            Ok((alg.element(NuSeries::new(0, coeffs)?)?, linear_exponential_path(&h)))
        };
        let (f, pf) = make()?;
        let (g, pg) = make()?;
        let lf = log_det(&alg, &f, &pf, &settings)?;
        let lg = log_det(&alg, &g, &pg, &settings)?;
        let lfg = log_det(&alg, &alg.star_product(&f, &g)?, &LoopFamily::pointwise_product(&pf, &pg)?, &settings)?;
        Ok(Check::new("multiplicativity", mod_two_pi_i(lfg - lf - lg).norm(), t.multiplicativity)
            .complex("log_det_f", lf)
            .complex("log_det_g", lg)
            .complex("log_det_fg", lfg)
            .require(lf.norm() > 1e-4 && lg.norm() > 1e-4))
    }));
    checks.push(guarded("path independence", t.path_independence, || {
        let h = interior_traceless(&mut rng, prof, 0.8)?;
        let k = interior_traceless(&mut rng, prof, 0.8)?;
        let direct = log_det(&alg, &alg.zero_order(h.exp())?, &linear_exponential_path(&h), &settings)?;
        let detour = LoopFamily::pointwise_product(&linear_exponential_path(&h), &exponential_path(&k, |s| s * (1.0 - s), |s| 1.0 - 2.0 * s))?;
        let other = log_det(&alg, &alg.zero_order(h.exp())?, &detour, &settings)?;
        Ok(Check::new("path independence", mod_two_pi_i(direct - other).norm(), t.path_independence)
            .complex("direct", direct)
            .complex("detour", other)
            .require(direct.norm() > 1e-6))
    }));
    checks
}

// ---------------------------------------------------------------- higher dimensions

fn fuzzy(cfg: &RunConfig, max_twice_j: u32, spin: f64) -> Vec<Check> {
    let t = &cfg.tolerances;
    let mut checks = Vec::new();
    let name = format!("commutation relations 2j <= {max_twice_j}");
    checks.push(guarded(&name, t.fuzzy_relations, || {
        let mut worst: f64 = 0.0;
        let mut dims_ok = true;
        for tj in 0..=max_twice_j {
            let f = su2_irrep(tj as f64 / 2.0)?;
            worst = worst.max(f.commutation_residual());
            dims_ok &= f.dim() == tj as usize + 1;
        }
        Ok(Check::new(name.clone(), worst, t.fuzzy_relations).require(dims_ok))
    }));
    let name = format!("casimir -j(j+1) for 2j <= {max_twice_j}");
    checks.push(guarded(&name, t.casimir, || {
        let worst = (0..=max_twice_j).map(|tj| su2_irrep(tj as f64 / 2.0).map(|f| f.casimir_residual())).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
        Ok(Check::new(name.clone(), worst, t.casimir))
    }));
    checks.push(guarded("spin-1 casimir", t.casimir, || {
        let f = su2_irrep(1.0)?;
        let r = (&f.casimir() + &MatrixNC::identity(3).scale(c(2.0, 0.0))).max_abs();
        Ok(Check::new("spin-1 casimir", r, t.casimir).reference("representation", &[("casimir", -2.0)]))
    }));
    let name = format!("matrix-valued loop cocycle against the disk cocycle (j={spin})");
    checks.push(guarded(&name, t.fuzzy_cocycle, || {
        let alg = cfg.algebra();
        let fz = su2_irrep(spin)?;
        let d = fz.dim();
        let tr = fz.trace_functional();
        let [x, _, z] = fz.generators();
        let herm = [MatrixNC::identity(d), x.scale(c(0.0, 1.0)), &(x * z) + &(z * x)];
        let mut rng = seeded_rng(cfg.seed.wrapping_add(5));
        let mut coeff = |k: usize| random_su(&mut rng, 2, 1.0).kron(&herm[k]);
        let f = MatrixLoop::new(2 * d, vec![(1, coeff(1)), (-2, coeff(2)), (2, coeff(0))])?;
        let g = MatrixLoop::new(2 * d, vec![(-1, coeff(1)), (2, coeff(2)), (3, coeff(0))])?;
        let expected = loop_cocycle_s(&f, &g, &tr, CocycleNormalization::OverTwoPiI)?;
        let r = lie_cocycle(&alg, &f.to_loop_element(cfg.profile())?, &g.to_loop_element(cfg.profile())?)?;
        Ok(Check::new(name.clone(), rel(r.c_star, expected.value()), t.fuzzy_cocycle)
            .complex("c_star", r.c_star)
            .complex("over_two_pi", expected.over_two_pi)
            .reference_complex("mode sum, 1/2πi normalization", "value", expected.value())
            .require(expected.value().norm() > 1e-3))
    }));
    checks
}

// ---------------------------------------------------------------- current deformation

fn random_block_operator(rng: &mut impl Rng, lambda: usize, n_g: usize) -> Result<BlockOperator> {
    let t = build_truncation(lambda, n_g)?;
    BlockOperator::from_dense(&random_matrix(rng, t.size(), 1.0), 2 * n_g)
}

fn current_deformation(cfg: &RunConfig, p: &Params) -> (Vec<Check>, Vec<Table>) {
    let t = &cfg.tolerances;
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    checks.push(guarded("truncation invariants", 1e-13, || {
        let tr = build_truncation(1, 1)?;
        let [sq, herm_e, herm_d, comm] = tr.invariant_residuals()?;
        Ok(Check::new("truncation invariants", comm.max(herm_e).max(herm_d), 1e-13)
            .value("size", tr.size() as f64)
            .value("eps_squared_minus_identity", sq)
            .require(tr.size() == 54 && sq < 1e-14))
    }));
    let mut rng = seeded_rng(cfg.seed.wrapping_add(6));
    checks.push(guarded("lundberg cocycle identities at cutoff 2", t.lundberg, || {
        let tr = build_truncation(2, 1)?;
        let ops = (0..3).map(|_| random_block_operator(&mut rng, 2, 1)).collect::<Result<Vec<_>>>()?;
        let (x, y, z) = (&ops[0], &ops[1], &ops[2]);
        let cc = |a: &BlockOperator, b: &BlockOperator| lundberg_cocycle(a, b, &tr);
        let scale = cc(x, y)?.norm().max(1.0);
        let anti = (cc(x, y)? + cc(y, x)?).norm().max(cc(x, x)?.norm());
        let jac = cc(&x.commutator(y)?, z)? + cc(&y.commutator(z)?, x)? + cc(&z.commutator(x)?, y)?;
        Ok(Check::new("lundberg cocycle identities at cutoff 2", anti.max(jac.norm()) / scale, t.lundberg)
            .value("antisymmetry", anti / scale)
            .value("cocycle_identity", jac.norm() / scale))
    }));
    checks.push(guarded("one-dimensional shifts", 0.0, || {
        let mut worst: f64 = 0.0;
        for lambda in 1..=6usize {
            let model = OneDimModel::new(lambda);
            for m in 1..=lambda as i64 {
                let v = model.cocycle(&model.shift(m), &model.shift(-m))?;
                worst = worst.max((v - c(-(m as f64), 0.0)).norm());
            }
        }
        Ok(Check::new("one-dimensional shifts", worst, 0.0).reference("c(E(m), E(-m)) = -m", &[]))
    }));
    checks.push(guarded("single-mode closed form", t.closed_form, || {
        let tr = build_truncation(2, 2)?;
        let mut worst: f64 = 0.0;
        for q in [[1, 0, 0], [0, -1, 1], [1, 1, 1]] {
            let a = random_su(&mut rng, 2, 1.0);
            let xc = CurrentOperator::single(q, a.clone())?.compress(&tr)?;
            for sign in [DeformationSign::Cancelling, DeformationSign::Reinforcing] {
                let xt = deform_signed(&xc, &tr, sign)?;
                for (j, n) in tr.modes().iter().enumerate() {
                    if let Some(i) = tr.index([n[0] + q[0], n[1] + q[1], n[2] + q[2]]) {
                        let got = xt.block(i, j).cloned().unwrap_or_else(|| MatrixNC::zeros(4));
                        worst = worst.max((&got - &deformed_block(*n, q, &a, sign)).max_abs());
                    }
                }
            }
        }
        Ok(Check::new("single-mode closed form", worst, t.closed_form))
    }));
    checks.push(guarded("constant current is unchanged", 0.0, || {
        let tr = build_truncation(2, 2)?;
        let xc = CurrentOperator::single([0, 0, 0], random_su(&mut rng, 2, 1.0))?.compress(&tr)?;
        Ok(Check::new("constant current is unchanged", deform(&xc, &tr)?.sub(&xc)?.max_abs(), 0.0))
    }));
    let single = || CurrentOperator::single([1, 0, 0], MatrixNC::scalar(c(0.0, 1.0)));
    checks.push(guarded("hilbert-schmidt trend", 0.0, || {
        let rows = hs_norm_comparison(&single()?, &p.cutoffs)?;
        let gaps = hs_trend_gaps(&rows);
        let mut table = Table::new("hilbert-schmidt norms", &["cutoff", "plain", "deformed"]);
        rows.iter().for_each(|r| table.row(&[r.cutoff as f64, r.plain, r.deformed]));
        tables.push(table);
        let violations = gaps.iter().filter(|g| **g <= 1.0).count() + gaps.windows(2).filter(|w| w[1] <= w[0]).count();
        let mut check = Check::new("hilbert-schmidt trend", violations as f64, 0.0).require(gaps.len() >= 2);
        for (i, g) in gaps.iter().enumerate() {
            check = check.value(&format!("gap_{}_{}", rows[i].cutoff, rows[i + 1].cutoff), *g);
        }
        Ok(check)
    }));
    if let Ok(rows) = single().and_then(|x| hs_norm_comparison_signed(&x, &p.cutoffs, DeformationSign::Reinforcing)) {
        let mut table = Table::new("hilbert-schmidt norms, reinforcing sign", &["cutoff", "plain", "deformed", "gap"]);
        let gaps = hs_trend_gaps(&rows);
        for (i, r) in rows.iter().enumerate() {
            let gap = if i == 0 { f64::NAN } else { gaps[i - 1] };
            table.row(&[r.cutoff as f64, r.plain, r.deformed, gap]);
        }
        tables.push(table);
    }
    checks.push(guarded("commutator defect trend", 0.0, || {
        let [s1, s2, _] = MatrixNC::pauli();
        let x = CurrentOperator::single([1, 0, 0], s1.scale(c(0.0, 1.0)))?;
        let y = CurrentOperator::single([0, 1, 0], s2.scale(c(0.0, 1.0)))?;
        let mut table = Table::new("commutator defect", &["cutoff", "weighted_defect", "weighted_commutator", "defect_hs"]);
        let mut ratios = Vec::new();
        for &l in &p.defect_cutoffs {
            let (_, d) = commutator_defect(&x, &y, &build_truncation(l, 2)?)?;
            table.row(&[l as f64, d.weighted_defect, d.weighted_commutator, d.defect_hs]);
            ratios.push(d.weighted_defect / d.weighted_commutator);
        }
        tables.push(table);
        let violations = ratios.windows(2).filter(|w| !(w[1] < w[0])).count();
        Ok(Check::new("commutator defect trend", violations as f64, 0.0).require(ratios.len() >= 2))
    }));
    (checks, tables)
}
