//! Verification suites over parsed instances.

use clap::ValueEnum;
use grsk_core::grsk::{self, Word};
use grsk_core::lattice::Point;
use grsk_core::numerics::Rational;
use grsk_core::semidiscrete::check::{check_path_formula, check_posdov, check_sdinv_with, check_taum, laplace_check};
use grsk_core::semidiscrete::transform::sd_w;
use grsk_core::semidiscrete::zero::{check_sdzero_with, w0 as sd_w0};
use grsk_core::semidiscrete::Environment;
use grsk_core::tropical::{self, HeightField};
use grsk_core::{invariance, lgv, pitman, Error, PLFunction, PosRational, Result, SdEndpoints, Verdict, WeightField};
use serde::{Deserialize, Serialize};

use crate::instance::{Instance, InstanceFile, Kind};
use crate::report::{Context, Record};

/// Inverse temperatures of the semi-discrete Laplace check.
pub const LAPLACE_BETAS: [f64; 3] = [4.0, 16.0, 64.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Main,
    Grsk,
    Lgv,
    Tropical,
    Semi,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Main => "main",
            Suite::Grsk => "grsk",
            Suite::Lgv => "lgv",
            Suite::Tropical => "tropical",
            Suite::Semi => "semi",
            Suite::All => "all",
        }
    }

    /// The instance kind a single suite runs on; `None` for `all`.
    pub fn kind(self) -> Option<Kind> {
        match self {
            Suite::Main | Suite::Grsk | Suite::Lgv => Some(Kind::Discrete),
            Suite::Tropical => Some(Kind::Tropical),
            Suite::Semi => Some(Kind::Semidiscrete),
            Suite::All => None,
        }
    }

    /// The single suites that `self` runs on instances of `kind`.
    pub fn expand(self, kind: Kind) -> Vec<Suite> {
        match (self, kind) {
            (Suite::All, Kind::Discrete) => vec![Suite::Main, Suite::Grsk, Suite::Lgv],
            (Suite::All, Kind::Tropical) => vec![Suite::Tropical],
            (Suite::All, Kind::Semidiscrete) => vec![Suite::Semi],
            (s, k) if s.kind() == Some(k) => vec![s],
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub tol: f64,
    pub betas: Vec<u32>,
    pub inject_fault: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: 1e-6, betas: vec![1, 2, 4, 8], inject_fault: false }
    }
}

/// Runs `suite` on one instance file.
pub fn run_suite(suite: Suite, file: &InstanceFile, settings: &Settings) -> Vec<Record> {
    let ctx = Context { digest: file.digest(), seed: file.seed };
    let inst = match file.instance() {
        Ok(i) => i,
        Err(e) => return vec![Record::from_error(&ctx, "parse", "well-formed instance", &e)],
    };
    let suites = suite.expand(inst.kind());
    if suites.is_empty() {
        let e = Error::InvalidInput(format!("suite {} does not apply to {:?} instances", suite.name(), inst.kind()));
        return vec![Record::from_error(&ctx, "suite", "matching instance kind", &e)];
    }
    let mut out = Vec::new();
    for s in suites {
        match (&inst, s) {
            (Instance::Discrete { d, us, vs }, Suite::Main) => out.extend(main_suite(&ctx, d, us, vs, settings)),
            (Instance::Discrete { d, .. }, Suite::Grsk) => out.extend(grsk_suite(&ctx, d, settings)),
            (Instance::Discrete { d, .. }, Suite::Lgv) => out.extend(lgv_suite(&ctx, d, settings)),
            (Instance::Tropical { f, us, vs }, Suite::Tropical) => out.extend(tropical_suite(&ctx, f, us, vs, settings)),
            (Instance::Semidiscrete { f, us, vs }, Suite::Semi) => out.extend(semi_suite(&ctx, f, us, vs, settings)),
            _ => unreachable!("expand only yields matching suites"),
        }
    }
    out
}

fn doubled(x: &PosRational) -> PosRational {
    x * &PosRational::from_integer(2).expect("2 is positive")
}

fn main_suite(ctx: &Context, d: &WeightField, us: &[usize], vs: &[usize], s: &Settings) -> Vec<Record> {
    vec![
        Record::run(ctx, "invariance", "D[U->V] = (WD)[^U->V]", || {
            let mut wd = pitman::w(d)?;
            if s.inject_fault {
                let v = *vs.last().expect("k >= 1");
                wd = wd.with_value(v, 1, doubled(&wd.value(v, 1)?))?;
            }
            Ok(invariance::check_invariance_with(d, &wd, us, vs)?.verdict)
        }),
        Record::run(ctx, "single-paths", "D[(u,n)->(v,1)] = (WD)[(u,n^u)->(v,1)]", || invariance::check_single_paths(d)),
    ]
}

/// Replays every row insertion and compares it with the Pitman pair.
pub fn insertion_matches_pitman(rows: &[Vec<PosRational>]) -> Result<Verdict> {
    let seq = grsk::tableau_sequence(rows)?;
    let width = rows[0].len();
    let mut count = 0usize;
    for (t, row) in rows.iter().enumerate() {
        let mut b = Word::entries(1, row.clone());
        for l in 1..=(t + 1).min(width) {
            let fresh = l == t + 1;
            let xi = if fresh {
                Word::Empty { start: l, len: width - l + 1 }
            } else {
                Word::entries(l, seq[t - 1].diagonal(l).to_vec())
            };
            let mut v = grsk::pitman_equals_insertion(&xi, &b)?;
            if !v.holds {
                v.counterexample = v.counterexample.map(|c| format!("row {} into diagonal {l}: {c}", t + 1));
                return Ok(v);
            }
            count += 1;
            if fresh {
                break;
            }
            match grsk::row_insert(&xi, &b)?.1 {
                Some(w) if !w.is_empty() => b = w,
                _ => break,
            }
        }
    }
    Ok(Verdict::passed(format!("{count} insertions"), format!("{count} Pitman pairs")))
}

fn grsk_suite(ctx: &Context, d: &WeightField, s: &Settings) -> Vec<Record> {
    let rows = grsk::rows_from_field(d);
    let rows = || rows.clone();
    vec![
        Record::run(ctx, "tableau-w", "z_{k,l} = (WD)_l(k)", || {
            let mut p = grsk::p_tableau(&rows()?)?;
            if s.inject_fault {
                let w = p.width();
                p = p.with_entry(w, 1, doubled(p.z(w, 1)));
            }
            grsk::check_tableau_against(&p, &pitman::w(d)?)
        }),
        Record::run(ctx, "packed-products", "prod_{r<=l} (WD)_r(N) = D[([1,l],n)->([N-l+1,N],1)]", || grsk::check_w_products(d)),
        Record::run(ctx, "shape", "(WD)(N) = sh P", || grsk::check_w_shape(d)),
        Record::run(ctx, "q-sequence", "((WD)(t))_{t<=N} = Q", || grsk::check_w_q_sequence(d)),
        Record::run(ctx, "z-tau", "z_{k,l} = tau_{k,l} / tau_{k,l-1}", || {
            let rows = rows()?;
            Ok(grsk::compare_tableaux(&grsk::p_tableau(&rows)?, &grsk::z_from_tau(&rows)?))
        }),
        Record::run(ctx, "insertion-pitman", "(xi', B') = (xi (.) B, B (x) xi)", || insertion_matches_pitman(&rows()?)),
    ]
}

const A_PRIORI: [(&str, &str); 4] = [
    ("a-priori-1", "first-row minors of M and M~ agree"),
    ("a-priori-2", "minor > 0 iff k<=n, i<=j or k>n, i=j"),
    ("a-priori-3", "diagonal minors of M and M~ agree"),
    ("a-priori-4", "minors with k>n, i<j vanish"),
];

fn lgv_suite(ctx: &Context, d: &WeightField, s: &Settings) -> Vec<Record> {
    let built = lgv::build_matrices(d).map(|(m, mut mt)| {
        if s.inject_fault {
            let size = mt.size();
            let bumped = mt.get(1, size) + Rational::from_integer(1.into());
            mt.set(1, size, bumped);
        }
        (m, mt)
    });
    let n = d.n();
    let mut out = vec![Record::run(ctx, "dj-induction", "all contiguous minors of M~ = those of M", || {
        let (m, mt) = built.clone()?;
        lgv::dj_induction_verify(&m, &mt, n)
    })];
    let verdicts = built.and_then(|(m, mt)| lgv::check_a_priori(&m, &mt, n));
    for (i, (name, anchor)) in A_PRIORI.iter().enumerate() {
        out.push(Record::run(ctx, name, anchor, || verdicts.clone().map(|v| v[i].clone())));
    }
    out
}

fn tropical_suite(ctx: &Context, f: &HeightField, us: &[usize], vs: &[usize], s: &Settings) -> Vec<Record> {
    let n = f.n();
    vec![
        Record::run(ctx, "dzero", "f[U->V]0 = (W0 f)[^U->V]0", || {
            let mut wf = tropical::w0(f)?;
            if s.inject_fault {
                let v = *vs.last().expect("k >= 1");
                let bumped = wf.level(1).at(v) + Rational::from_integer(1.into());
                wf = wf.with_value(v, 1, bumped)?;
            }
            tropical::check_dzero_with(f, &wf, us, vs)
        }),
        Record::run(ctx, "beta-bridge", "0 <= log2 D^b[U->V] / b - f0[U->V] <= log2|U->V| / b", || {
            let u: Vec<Point> = us.iter().map(|&x| Point::new(x, n)).collect();
            let v: Vec<Point> = vs.iter().map(|&x| Point::new(x, 1)).collect();
            Ok(tropical::beta_bridge(f, &s.betas, &u, &v)?.verdict)
        }),
    ]
}

/// `h_j(t) + t` on every level.
struct Tilted<E>(E);

impl<E: Environment> Environment for Tilted<E> {
    fn n(&self) -> usize {
        self.0.n()
    }

    fn horizon(&self) -> f64 {
        self.0.horizon()
    }

    fn value(&self, level: usize, t: f64) -> f64 {
        self.0.value(level, t) + t
    }

    fn knots(&self) -> Vec<f64> {
        self.0.knots()
    }

    fn max_width(&self) -> f64 {
        self.0.max_width()
    }
}

fn semi_suite(ctx: &Context, f: &[PLFunction], us: &[Rational], vs: &[Rational], s: &Settings) -> Vec<Record> {
    let n = f.len();
    let tol = s.tol;
    let ends = || SdEndpoints::bottom_to_top(us, vs, n);
    let mut out = vec![
        Record::run(ctx, "sdzero", "f0[U->V] = (W0 f)[U->V]", || {
            let mut wf = sd_w0(f)?;
            if s.inject_fault {
                let tilt = PLFunction::linear(f[0].horizon().clone(), Rational::from_integer(1.into()));
                wf = wf.iter().map(|g| g.add(&tilt)).collect::<Result<_>>()?;
            }
            Ok(check_sdzero_with(f, &wf, &ends()?)?.verdict)
        }),
        Record::run(ctx, "sdinv", "f[U->V] = (Wf)[U->V]", || {
            let wf = sd_w(f, tol / 4.0)?;
            let ends = ends()?;
            let rep = if s.inject_fault {
                check_sdinv_with(f, &Tilted(wf), &ends, tol)?
            } else {
                check_sdinv_with(f, &wf, &ends, tol)?
            };
            Ok(rep.verdict)
        }),
    ];
    for m in 1..n {
        out.push(Record::run(ctx, &format!("taum-{m}"), &format!("f[U->V] = (T_{m} f)[U->V]"), || {
            Ok(check_taum(f, &ends()?, m, tol)?.verdict)
        }));
    }
    if n == 2 {
        out.push(Record::run(ctx, "posdov", "s(u,v) - s(0,v) - s(0,u) = log int_u^v e^(g - 2 s(0,t)) dt", || {
            Ok(check_posdov(f, &us[0], &vs[0], tol)?.verdict)
        }));
        out.push(Record::run(ctx, "path-formula", "(Wf)_1(t) = f[(0,2)->(t,1)]", || {
            Ok(check_path_formula(f, &vs[0], tol)?.verdict)
        }));
    }
    out.push(Record::run(ctx, "laplace", "(b f)[U->V] / b - f0[U->V] <= log(vol) / b", || {
        Ok(laplace_check(f, &ends()?, &LAPLACE_BETAS, tol, 10.0 * tol)?.1)
    }));
    out
}
