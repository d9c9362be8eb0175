//! Case bounds for the eight-fold product.
//!
//! Every quantity is a monomial `x^X T^t U^a V^b W^c 𝓛^k` where `X` is an
//! affine form in the block exponents. A bound `min(f_1, …, f_r)` is
//! replaced by a weighted geometric mean `Π f_j^{w_j}` with `Σ w_j = 1`;
//! a minimum of two such products is handled the same way one level up.
//! After multiplying by `UVW` the splitting levels must cancel; any that
//! survive are removed with `U << x^{ℓ/2}`, `V << M^{1/2}`, `W << N^{1/2}`
//! or `U, V, W >= x^{-1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use super::lemma4::{PartitionOutcome, Variant};
use super::{rat, theta_max, ExponentTuple, Rational};
use crate::{Error, Result};

/// Whether chain factors are taken verbatim from the printed
/// inequalities or rebuilt from the definitions of the minima they bound.
/// The two differ in three factors, see [`printed_discrepancies`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorSource {
    Printed,
    Definition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// Variant B Cauchy–Schwarz terms: `Q²T`, `x^{1/2}`, `(Q²T)^{1/2} max(M,N)^{1/2}`.
    BGeneric(u8),
    /// Variant A triples with one factor below `x^{-1}`.
    ASmallValues,
    ACase1,
    ACase2A1,
    ACase2B1,
    ACase3A2,
    ACase3B2,
    ACase4A2,
    ACase4B2,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseId::BGeneric(k) => write!(f, "B-generic-{k}"),
            CaseId::ASmallValues => f.write_str("A-small-values"),
            CaseId::ACase1 => f.write_str("A-Case1"),
            CaseId::ACase2A1 => f.write_str("A-Case2-A1"),
            CaseId::ACase2B1 => f.write_str("A-Case2-B1"),
            CaseId::ACase3A2 => f.write_str("A-Case3-A2"),
            CaseId::ACase3B2 => f.write_str("A-Case3-B2"),
            CaseId::ACase4A2 => f.write_str("A-Case4-mirror-A2"),
            CaseId::ACase4B2 => f.write_str("A-Case4-mirror-B2"),
        }
    }
}

/// `m·M + n·N + l·ℓ + mx·max(M, N) + kappa·κ + theta·θ + c`, where
/// `M, N, ℓ` are the exponents of the two blocks and the singleton and
/// `κ = max(2θ, 9/20)` stands for the printed `x^{9/20}` (which bounds `Q²`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XAffine {
    pub m: Rational,
    pub n: Rational,
    pub l: Rational,
    pub mx: Rational,
    pub kappa: Rational,
    pub theta: Rational,
    pub c: Rational,
}

impl XAffine {
    pub fn zero() -> Self {
        let z = Rational::zero();
        Self { m: z, n: z, l: z, mx: z, kappa: z, theta: z, c: z }
    }

    fn add(self, o: Self) -> Self {
        Self {
            m: self.m + o.m,
            n: self.n + o.n,
            l: self.l + o.l,
            mx: self.mx + o.mx,
            kappa: self.kappa + o.kappa,
            theta: self.theta + o.theta,
            c: self.c + o.c,
        }
    }

    fn scale(self, w: Rational) -> Self {
        Self {
            m: self.m * w,
            n: self.n * w,
            l: self.l * w,
            mx: self.mx * w,
            kappa: self.kappa * w,
            theta: self.theta * w,
            c: self.c * w,
        }
    }

    pub fn eval(&self, p: &Point) -> Rational {
        self.m * p.m
            + self.n * p.n
            + self.l * p.l
            + self.mx * p.m.max(p.n)
            + self.kappa * p.kappa()
            + self.theta * p.theta
            + self.c
    }
}

/// Block exponents of one tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Point {
    pub m: Rational,
    pub n: Rational,
    pub l: Rational,
    pub theta: Rational,
}

impl Point {
    pub fn kappa(&self) -> Rational {
        (self.theta * 2).max(rat(9, 20))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    pub x: XAffine,
    pub t: Rational,
    pub u: Rational,
    pub v: Rational,
    pub w: Rational,
    pub log: Rational,
}

impl Monomial {
    pub fn one() -> Self {
        let z = Rational::zero();
        Self { x: XAffine::zero(), t: z, u: z, v: z, w: z, log: z }
    }

    fn mul(self, o: Self) -> Self {
        Self {
            x: self.x.add(o.x),
            t: self.t + o.t,
            u: self.u + o.u,
            v: self.v + o.v,
            w: self.w + o.w,
            log: self.log + o.log,
        }
    }

    fn pow(self, e: Rational) -> Self {
        Self { x: self.x.scale(e), t: self.t * e, u: self.u * e, v: self.v * e, w: self.w * e, log: self.log * e }
    }

    /// Exchanges the roles of the two blocks: `M ↔ N`, `V ↔ W`.
    pub fn mirror(self) -> Self {
        let mut x = self.x;
        core::mem::swap(&mut x.m, &mut x.n);
        Self { x, v: self.w, w: self.v, ..self }
    }

    /// Multiplies by `UVW` and eliminates whatever powers of `U, V, W` remain.
    fn normalize(self) -> Self {
        let mut out = self;
        out.u += 1;
        out.v += 1;
        out.w += 1;
        let half = rat(1, 2);
        let z = Rational::zero();
        for (e, upper) in [(out.u, 0usize), (out.v, 1), (out.w, 2)] {
            if e > z {
                match upper {
                    0 => out.x.l += e * half,
                    1 => out.x.m += e * half,
                    _ => out.x.n += e * half,
                }
            } else if e < z {
                out.x.c -= e;
            }
        }
        out.u = z;
        out.v = z;
        out.w = z;
        out
    }
}

fn r(n: i128) -> Rational {
    Rational::from(n)
}

/// `x^κ T`.
fn xk_t() -> Monomial {
    let mut m = Monomial::one();
    m.x.kappa = r(1);
    m.t = r(1);
    m
}

#[derive(Debug, Clone, Copy)]
struct Terms {
    a: Monomial,
    b: Monomial,
    c: Monomial,
    d: Monomial,
    e: Monomial,
    f: Monomial,
    f12: Monomial,
}

/// The six entries of the Case 2 minima, with their log powers.
/// `p = (7-b)²`, `q = b²`.
fn case2_terms(bsize: i128) -> Terms {
    let p = (7 - bsize) * (7 - bsize);
    let q = bsize * bsize;
    let mut a = xk_t();
    a.v = r(-2);
    a.log = r(p + 5);
    let mut b = xk_t();
    b.w = r(-2);
    b.log = r(q + 5);
    let mut c = xk_t();
    c.x.m = r(1);
    c.v = r(-6);
    c.log = r(3 * p + 15);
    let mut d = xk_t();
    d.x.n = r(1);
    d.w = r(-6);
    d.log = r(3 * q + 15);
    let mut e = xk_t();
    e.u = r(-4);
    e.log = r(10);
    let mut f = Monomial::one();
    f.x.l = r(2);
    f.u = r(-4);
    f.log = r(9);
    let mut f12 = xk_t();
    f12.x.l = r(2);
    f12.u = r(-12);
    f12.log = r(27);
    Terms { a, b, c, d, e, f, f12 }
}

/// Case 3 minima carry no log powers (they sit in `𝓛^{K_4}`).
fn case3_terms() -> Terms {
    let mut t = case2_terms(0);
    t.b = Monomial::one();
    t.b.x.n = r(1);
    t.b.w = r(-2);
    for m in [&mut t.a, &mut t.b, &mut t.c, &mut t.d, &mut t.e, &mut t.f, &mut t.f12] {
        m.log = Rational::zero();
    }
    t
}

fn without_t(mut m: Monomial) -> Monomial {
    m.t = Rational::zero();
    m
}

fn without_n(mut m: Monomial) -> Monomial {
    m.x.n = Rational::zero();
    m
}

/// A chain: a minimum of weighted products, itself bounded by a weighted
/// geometric mean with `outer` weights.
struct Chain {
    products: Vec<Vec<(Monomial, Rational)>>,
    outer: Vec<Rational>,
}

impl Chain {
    fn flatten(&self) -> Monomial {
        let one = Rational::one();
        assert_eq!(self.outer.iter().copied().sum::<Rational>(), one, "outer weights");
        let mut out = Monomial::one();
        for (prod, &ow) in self.products.iter().zip(&self.outer) {
            assert_eq!(prod.iter().map(|p| p.1).sum::<Rational>(), one, "inner weights");
            assert!(ow >= Rational::zero() && prod.iter().all(|p| p.1 >= Rational::zero()));
            for &(m, w) in prod {
                out = out.mul(m.pow(w * ow));
            }
        }
        out
    }

    fn product(&self, i: usize) -> Monomial {
        self.products[i].iter().fold(Monomial::one(), |acc, &(m, w)| acc.mul(m.pow(w)))
    }
}

fn a1_chain(t: &Terms, src: FactorSource) -> Chain {
    let d = match src {
        FactorSource::Printed => without_n(t.d),
        FactorSource::Definition => t.d,
    };
    let head = |last: Monomial| {
        vec![(t.a, rat(5, 16)), (t.b, rat(5, 16)), (t.c, rat(1, 16)), (d, rat(1, 16)), (last, rat(1, 4))]
    };
    // min(1, z) <= z^{1/8} with z = (f-product)/(e-product).
    Chain { products: vec![head(t.e), head(t.f)], outer: vec![rat(7, 8), rat(1, 8)] }
}

fn b1_chain(t: &Terms, src: FactorSource) -> Chain {
    let e = match src {
        FactorSource::Printed => without_t(t.e),
        FactorSource::Definition => t.e,
    };
    Chain {
        products: vec![
            vec![(t.a, rat(5, 16)), (t.b, rat(5, 16)), (t.c, rat(1, 16)), (t.d, rat(1, 16)), (e, rat(1, 4))],
            vec![(t.a, rat(7, 16)), (t.b, rat(7, 16)), (t.c, rat(1, 48)), (t.d, rat(1, 48)), (t.f12, rat(1, 12))],
        ],
        outer: vec![rat(7, 10), rat(3, 10)],
    }
}

fn a2_chain(t: &Terms) -> Chain {
    let head = |last: Monomial| vec![(t.a, rat(1, 8)), (t.b, rat(1, 2)), (t.c, rat(1, 8)), (last, rat(1, 4))];
    Chain { products: vec![head(t.e), head(t.f)], outer: vec![rat(3, 4), rat(1, 4)] }
}

fn b2_chain(t: &Terms, src: FactorSource) -> Chain {
    let f12 = match src {
        FactorSource::Printed => without_t(t.f12),
        FactorSource::Definition => t.f12,
    };
    Chain {
        products: vec![
            vec![(t.a, rat(1, 8)), (t.b, rat(1, 2)), (t.c, rat(1, 8)), (t.e, rat(1, 4))],
            vec![(t.a, rat(3, 8)), (t.b, rat(1, 2)), (t.c, rat(1, 24)), (f12, rat(1, 12))],
        ],
        outer: vec![rat(1, 2), rat(1, 2)],
    }
}

fn case1_chain(t: &Terms) -> Chain {
    let mut s1 = Monomial::one();
    s1.x.m = r(1);
    s1.v = r(-2);
    s1.log = t.a.log;
    let mut s2 = Monomial::one();
    s2.x.n = r(1);
    s2.w = r(-2);
    s2.log = t.b.log;
    Chain { products: vec![vec![(s1, rat(1, 2)), (s2, rat(1, 2))]], outer: vec![r(1)] }
}

/// One evaluated bound `x^{x_exponent} T^{t_exponent} 𝓛^{log_power}` for
/// `UVWP` (variant A) or `E` (variant B).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseBound {
    pub case_id: CaseId,
    pub form: Monomial,
    pub x_exponent: Rational,
    pub t_exponent: Rational,
    /// `None` where the printed argument absorbs logs into an unspecified constant.
    pub log_power: Option<Rational>,
}

impl CaseBound {
    pub fn combined(&self, tau: Rational) -> Rational {
        self.t_exponent * tau + self.x_exponent
    }

    /// `max_{τ ∈ {0, 1}} (combined(τ) - (39/40 τ + 1/2))`.
    pub fn slack(&self) -> Rational {
        let half = rat(1, 2);
        let zero = self.combined(Rational::zero()) - half;
        let one = self.combined(Rational::one()) - rat(39, 40) - half;
        zero.max(one)
    }

    pub fn admissible(&self) -> bool {
        self.slack() <= Rational::zero()
    }

    /// Smallest `c` with `T^t x^X << T^c x^{1/2}` on `1 <= T <= x`, valid
    /// when `X <= 1/2`.
    pub fn t_exponent_at_half(&self) -> Rational {
        self.t_exponent + self.x_exponent - rat(1, 2)
    }
}

/// Flattened forms for every chain and every `b`, so the scan only
/// evaluates affine forms.
#[derive(Debug, Clone)]
pub struct CaseEngine {
    pub source: FactorSource,
    /// Indexed by `b = |A2|`.
    case2: Vec<(Monomial, Monomial)>,
    case1: Vec<Monomial>,
    case3: (Monomial, Monomial),
    case4: (Monomial, Monomial),
    bgeneric: [Monomial; 3],
    small: Monomial,
}

impl CaseEngine {
    pub fn new(source: FactorSource) -> Self {
        let case2 = (0..=8).map(|b| {
            let t = case2_terms(b);
            (a1_chain(&t, source).flatten().normalize(), b1_chain(&t, source).flatten().normalize())
        });
        let case1 = (0..=8).map(|b| case1_chain(&case2_terms(b)).flatten().normalize());
        let t3 = case3_terms();
        let a2 = a2_chain(&t3).flatten();
        let b2 = b2_chain(&t3, source).flatten();
        let case3 = (a2.normalize(), b2.normalize());
        let case4 = (a2.mirror().normalize(), b2.mirror().normalize());

        let mut q2t = Monomial::one();
        q2t.x.theta = r(2);
        q2t.t = r(1);
        let mut sqrt_x = Monomial::one();
        sqrt_x.x.c = rat(1, 2);
        let mut cross = Monomial::one();
        cross.x.theta = r(1);
        cross.x.mx = rat(1, 2);
        cross.t = rat(1, 2);
        Self {
            source,
            case2: case2.collect(),
            case1: case1.collect(),
            case3,
            case4,
            bgeneric: [q2t, sqrt_x, cross],
            small: q2t,
        }
    }

    /// Case 2 products before the final interpolation, used by the ledger
    /// to recover `K_2(b)` and `K_3(b)` from the weights.
    pub fn b1_products(&self, b: usize) -> (Monomial, Monomial) {
        let ch = b1_chain(&case2_terms(b as i128), self.source);
        (ch.product(0), ch.product(1))
    }

    /// Symbolic forms, before evaluation at a tuple.
    pub fn forms(&self, variant: Variant, b: usize) -> Vec<(CaseId, Monomial, Option<Rational>)> {
        match variant {
            Variant::B => {
                let lb = Rational::from((((8 - b) * (8 - b) + b * b) as i128, 2));
                (0..3).map(|k| (CaseId::BGeneric(k as u8 + 1), self.bgeneric[k], Some(lb))).collect()
            }
            Variant::A => {
                let (a1, b1) = self.case2[b];
                let c1 = self.case1[b];
                vec![
                    (CaseId::ASmallValues, self.small, Some(Rational::zero())),
                    (CaseId::ACase1, c1, Some(c1.log)),
                    (CaseId::ACase2A1, a1, None),
                    (CaseId::ACase2B1, b1, Some(b1.log)),
                    (CaseId::ACase3A2, self.case3.0, None),
                    (CaseId::ACase3B2, self.case3.1, None),
                    (CaseId::ACase4A2, self.case4.0, None),
                    (CaseId::ACase4B2, self.case4.1, None),
                ]
            }
        }
    }

    pub fn evaluate(&self, variant: Variant, b: usize, p: &Point) -> Vec<CaseBound> {
        self.forms(variant, b)
            .into_iter()
            .map(|(case_id, form, log_power)| CaseBound {
                case_id,
                form,
                x_exponent: form.x.eval(p),
                t_exponent: form.t,
                log_power,
            })
            .collect()
    }

    pub fn case_bounds(&self, e: &ExponentTuple, outcome: &PartitionOutcome) -> Result<Vec<CaseBound>> {
        outcome.verify(&e.u)?;
        let p = Point {
            m: outcome.m_exponent(&e.u),
            n: outcome.n_exponent(&e.u),
            l: outcome.l_exponent(&e.u),
            theta: e.theta,
        };
        if outcome.b() > 8 {
            return Err(Error::InconsistentOutcome("block larger than 8".into()));
        }
        Ok(self.evaluate(outcome.variant, outcome.b(), &p))
    }
}

/// Case bounds from the printed chains.
pub fn case_bounds(e: &ExponentTuple, outcome: &PartitionOutcome) -> Result<Vec<CaseBound>> {
    CaseEngine::new(FactorSource::Printed).case_bounds(e, outcome)
}

/// Maximum of an affine form over `0 <= M, N <= 9/20`, `ℓ >= 0`,
/// `M + N + ℓ <= 1` at `θ = 9/40`. Linear except for `max(M, N)`, which
/// is convex, so the maximum still sits at a vertex.
pub fn max_over_polytope(x: &XAffine) -> Rational {
    let cap = rat(9, 20);
    let z = Rational::zero();
    let mut best: Option<Rational> = None;
    for m in [z, cap] {
        for n in [z, cap] {
            for l in [z, Rational::one() - m - n] {
                let v = x.eval(&Point { m, n, l, theta: theta_max() });
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
    }
    best.unwrap()
}

/// A fraction the engine derives, next to the value printed in the proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublishedFraction {
    pub name: &'static str,
    pub computed: Rational,
    pub published: Rational,
    /// Equality required; otherwise `computed <= published` suffices.
    pub exact: bool,
}

impl PublishedFraction {
    pub fn holds(&self) -> bool {
        if self.exact {
            self.computed == self.published
        } else {
            self.computed <= self.published
        }
    }
}

/// Re-derives the printed exponents from the printed weights. The log
/// powers do not affect these, so `b = 2` is used throughout.
pub fn published_fractions() -> Vec<PublishedFraction> {
    let eng = CaseEngine::new(FactorSource::Printed);
    let (a1, b1) = eng.case2[2];
    let (a2, b2) = eng.case3;
    let q2t = CaseBound {
        case_id: CaseId::BGeneric(1),
        form: eng.bgeneric[0],
        x_exponent: eng.bgeneric[0].x.eval(&Point {
            m: Rational::zero(),
            n: Rational::zero(),
            l: Rational::zero(),
            theta: theta_max(),
        }),
        t_exponent: eng.bgeneric[0].t,
        log_power: None,
    };
    vec![
        PublishedFraction { name: "A1 T-exponent", computed: a1.t, published: rat(31, 32), exact: true },
        PublishedFraction {
            name: "A1 x-exponent",
            computed: max_over_polytope(&a1.x),
            published: rat(319, 640),
            exact: true,
        },
        PublishedFraction { name: "A2 T-exponent", computed: a2.t, published: rat(7, 16), exact: true },
        PublishedFraction {
            name: "A2 x-exponent",
            computed: max_over_polytope(&a2.x),
            published: rat(157, 320),
            exact: true,
        },
        PublishedFraction { name: "B2 T-exponent", computed: b2.t, published: rat(1, 2), exact: false },
        PublishedFraction {
            name: "B2 x-exponent",
            computed: max_over_polytope(&b2.x),
            published: rat(119, 240),
            exact: true,
        },
        PublishedFraction {
            name: "Q^2T T-exponent at x^(1/2)",
            computed: q2t.t_exponent_at_half(),
            published: rat(19, 20),
            exact: true,
        },
        PublishedFraction { name: "B1 T-exponent", computed: b1.t, published: rat(39, 40), exact: false },
        PublishedFraction {
            name: "B1 x-exponent",
            computed: max_over_polytope(&b1.x),
            published: rat(1, 2),
            exact: true,
        },
    ]
}

/// Factors whose printed form differs from the minimum it is meant to bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub chain: CaseId,
    pub factor: &'static str,
    pub printed_t: Rational,
    pub definition_t: Rational,
    /// Worst slack over the polytope for each reading at `θ = 9/40`.
    pub printed_slack: Rational,
    pub definition_slack: Rational,
}

/// Compares the printed and definitional chains. The A1 `N` factor and the
/// B2 `T` factor are harmless; the B1 `T` factor is not.
pub fn printed_discrepancies() -> Vec<Discrepancy> {
    let pr = CaseEngine::new(FactorSource::Printed);
    let de = CaseEngine::new(FactorSource::Definition);
    let slack = |m: &Monomial| {
        let x = max_over_polytope(&m.x);
        (x - rat(1, 2)).max(m.t + x - rat(59, 40))
    };
    let b = 2;
    vec![
        Discrepancy {
            chain: CaseId::ACase2A1,
            factor: "(x^(9/20) T W^-6)^(1/16) printed without N",
            printed_t: pr.case2[b].0.t,
            definition_t: de.case2[b].0.t,
            printed_slack: slack(&pr.case2[b].0),
            definition_slack: slack(&de.case2[b].0),
        },
        Discrepancy {
            chain: CaseId::ACase2B1,
            factor: "(x^(9/20) U^-4 L^10)^(1/4) printed without T",
            printed_t: pr.case2[b].1.t,
            definition_t: de.case2[b].1.t,
            printed_slack: slack(&pr.case2[b].1),
            definition_slack: slack(&de.case2[b].1),
        },
        Discrepancy {
            chain: CaseId::ACase3B2,
            factor: "(x^(9/20) L^2 U^-12)^(1/12) printed without T",
            printed_t: pr.case3.1.t,
            definition_t: de.case3.1.t,
            printed_slack: slack(&pr.case3.1),
            definition_slack: slack(&de.case3.1),
        },
    ]
}
