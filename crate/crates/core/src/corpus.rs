//! Built-in parameterized urns with known asymptotics, used for regression
//! and as starting points for new specs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::CorpusError;
use crate::model::{Atom, ReplacementRow, UrnSpec};
use crate::rational::Rational;
use crate::verify::Suite;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Param {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn param(name: &'static str, default: &'static str, help: &'static str) -> Param {
    Param { name, default, help }
}

type Builder = fn(&Params) -> Result<UrnSpec, String>;

#[derive(Clone, Serialize)]
pub struct Template {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub summary: &'static str,
    pub params: &'static [Param],
    /// Checks run by `corpus run`.
    pub suites: &'static [Suite],
    #[serde(skip)]
    build: Builder,
}

impl std::fmt::Debug for Template {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Template").field("name", &self.name).finish()
    }
}

/// Resolved parameter values of one instantiation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params(BTreeMap<String, Rational>);

impl Params {
    fn get(&self, name: &str) -> Rational {
        self.0[name].clone()
    }

    fn int(&self, name: &str) -> Result<i64, String> {
        self.get(name)
            .to_i64()
            .filter(|_| self.get(name).is_integer())
            .ok_or_else(|| format!("{name} must be an integer"))
    }
}

fn int(n: i64) -> Rational {
    Rational::from(n)
}

fn half() -> Rational {
    Rational::new(1, 2)
}

fn require(cond: bool, message: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message.to_string())
    }
}

fn labelled(mut spec: UrnSpec, labels: &[&str]) -> UrnSpec {
    for (c, l) in spec.colours.iter_mut().zip(labels) {
        c.label = Some((*l).to_string());
    }
    spec
}

fn unit(q: usize) -> Vec<Rational> {
    vec![Rational::one(); q]
}

fn classical(p: &Params) -> Result<UrnSpec, String> {
    let q = p.int("colours")?;
    require((2..=16).contains(&q), "colours must lie in 2..=16")?;
    let b = p.get("b");
    require(b.is_positive(), "b must be positive")?;
    let x = p.get("x");
    require(x.is_positive(), "x must be positive")?;
    let q = q as usize;
    let matrix = (0..q)
        .map(|i| (0..q).map(|j| if i == j { b.clone() } else { Rational::zero() }).collect())
        .collect();
    Ok(UrnSpec::deterministic(matrix, vec![x; q]))
}

fn diagonal(p: &Params) -> Result<UrnSpec, String> {
    let (alpha, delta) = (p.get("alpha"), p.get("delta"));
    require(alpha.is_positive() && delta.is_positive(), "alpha and delta must be positive")?;
    require(p.get("x1").is_positive() && p.get("x2").is_positive(), "both initial counts must be positive")?;
    Ok(labelled(
        UrnSpec::deterministic(
            vec![vec![alpha, Rational::zero()], vec![Rational::zero(), delta]],
            vec![p.get("x1"), p.get("x2")],
        ),
        &["white", "black"],
    ))
}

fn two_colour_checked(p: &Params) -> Result<UrnSpec, String> {
    let (delta, gamma, alpha) = (p.get("delta"), p.get("gamma"), p.get("alpha"));
    let (x1, x2) = (p.get("x1"), p.get("x2"));
    require(delta.is_positive() && gamma.is_positive(), "delta and gamma must be positive")?;
    require(x1.is_positive() && !x2.is_negative(), "need x1 > 0 and x2 >= 0")?;
    if alpha.is_negative() {
        require(
            alpha == int(-1) && gamma.is_integer() && x2.is_integer(),
            "a negative alpha must be -1, with integer gamma and x2",
        )?;
    }
    Ok(labelled(
        UrnSpec::deterministic(vec![vec![delta, gamma], vec![Rational::zero(), alpha]], vec![x1, x2]),
        &["white", "black"],
    ))
}

fn two_colour_equal(p: &Params) -> Result<UrnSpec, String> {
    require(p.get("alpha") == p.get("delta"), "this template needs alpha = delta")?;
    two_colour_checked(p)
}

fn two_colour_dominant(p: &Params) -> Result<UrnSpec, String> {
    require(p.get("alpha") > p.get("delta"), "this template needs alpha > delta")?;
    two_colour_checked(p)
}

fn two_colour_balanced(p: &Params) -> Result<UrnSpec, String> {
    require(
        p.get("delta") + p.get("gamma") == p.get("alpha"),
        "this template needs delta + gamma = alpha",
    )?;
    two_colour_checked(p)
}

fn random_two_colour(p: &Params) -> Result<UrnSpec, String> {
    let (delta, gamma, alpha, spread) = (p.get("delta"), p.get("gamma"), p.get("alpha"), p.get("spread"));
    require(gamma.is_positive() && delta.is_positive(), "delta and gamma must be positive")?;
    require(!alpha.is_negative(), "alpha must be nonnegative")?;
    require(!spread.is_negative() && spread <= delta, "spread must lie in [0, delta]")?;
    require(p.get("x1").is_positive() && !p.get("x2").is_negative(), "need x1 > 0 and x2 >= 0")?;
    let white = ReplacementRow::new(vec![
        Atom::new(half(), vec![&delta + &spread, gamma.clone()]),
        Atom::new(half(), vec![&delta - &spread, gamma]),
    ]);
    let black = ReplacementRow::deterministic(vec![Rational::zero(), alpha]);
    Ok(labelled(
        UrnSpec::from_parts(unit(2), vec![p.get("x1"), p.get("x2")], vec![white, black]),
        &["white", "black"],
    ))
}

fn bernoulli_row(p: &Rational, stay: Vec<Rational>, leave: Vec<Rational>) -> ReplacementRow {
    ReplacementRow::new(vec![Atom::new(p.clone(), stay), Atom::new(Rational::one() - p, leave)])
}

fn probability(p: &Params) -> Result<Rational, String> {
    let pr = p.get("p");
    require(pr.is_positive() && pr < Rational::one(), "p must lie strictly between 0 and 1")?;
    Ok(pr)
}

fn random_bernoulli(p: &Params) -> Result<UrnSpec, String> {
    let pr = probability(p)?;
    require(p.get("x1").is_positive() && !p.get("x2").is_negative(), "need x1 > 0 and x2 >= 0")?;
    let rows = vec![
        bernoulli_row(&pr, vec![int(1), int(0)], vec![int(0), int(1)]),
        ReplacementRow::deterministic(vec![int(0), int(1)]),
    ];
    Ok(labelled(
        UrnSpec::from_parts(unit(2), vec![p.get("x1"), p.get("x2")], rows),
        &["active", "passive"],
    ))
}

fn tree_percolation(p: &Params) -> Result<UrnSpec, String> {
    let pr = probability(p)?;
    let rows = vec![
        bernoulli_row(&pr, vec![int(1), int(0)], vec![int(0), int(1)]),
        ReplacementRow::deterministic(vec![int(0), int(1)]),
    ];
    Ok(labelled(UrnSpec::from_parts(unit(2), vec![int(1), int(0)], rows), &["active", "passive"]))
}

fn preferential(p: &Params) -> Result<UrnSpec, String> {
    let pr = probability(p)?;
    let alpha = p.get("alpha");
    require(!alpha.is_negative(), "alpha must be nonnegative")?;
    let rows = vec![
        bernoulli_row(&pr, vec![&alpha + &int(1), int(0)], vec![alpha.clone(), int(1)]),
        ReplacementRow::deterministic(vec![int(0), &alpha + &int(1)]),
    ];
    Ok(labelled(UrnSpec::from_parts(unit(2), vec![int(1), int(0)], rows), &["active", "passive"]))
}

fn preferential_dary(p: &Params) -> Result<UrnSpec, String> {
    let pr = probability(p)?;
    let d = p.int("d")?;
    require(d >= 2, "d must be an integer >= 2")?;
    require(int(d) * &pr > Rational::one(), "need d * p > 1")?;
    let rows = vec![
        bernoulli_row(&pr, vec![int(d - 1), int(0)], vec![int(-1), int(d)]),
        ReplacementRow::deterministic(vec![int(0), int(d - 1)]),
    ];
    Ok(labelled(UrnSpec::from_parts(unit(2), vec![int(d), int(0)], rows), &["active", "passive"]))
}

fn preferential_levels(p: &Params) -> Result<UrnSpec, String> {
    let pr = probability(p)?;
    let alpha = p.get("alpha");
    require(!alpha.is_negative(), "alpha must be nonnegative")?;
    let q = p.int("colours")?;
    require((2..=12).contains(&q), "colours must lie in 2..=12")?;
    let q = q as usize;
    let mut rows = Vec::with_capacity(q);
    for i in 0..q - 1 {
        let mut stay = vec![Rational::zero(); q];
        stay[i] = &alpha + &int(1);
        let mut leave = vec![Rational::zero(); q];
        leave[i] = alpha.clone();
        leave[i + 1] = int(1);
        rows.push(bernoulli_row(&pr, stay, leave));
    }
    let mut top = vec![Rational::zero(); q];
    top[q - 1] = &alpha + &int(1);
    rows.push(ReplacementRow::deterministic(top));
    let mut x = vec![Rational::zero(); q];
    x[0] = int(1);
    Ok(UrnSpec::from_parts(unit(q), x, rows))
}

fn three_colour_checked(p: &Params) -> Result<UrnSpec, String> {
    let (alpha, beta, delta, sigma) = (p.get("alpha"), p.get("beta"), p.get("delta"), p.get("sigma"));
    require(beta.is_positive() && delta.is_positive(), "beta and delta must be positive")?;
    require(sigma >= &alpha + &beta, "need sigma >= alpha + beta")?;
    require(sigma >= delta, "need sigma >= delta")?;
    let x = vec![p.get("x1"), p.get("x2"), p.get("x3")];
    require(x[0].is_positive() && x.iter().all(|v| !v.is_negative()), "need x1 > 0 and x2, x3 >= 0")?;
    let z = Rational::zero;
    let matrix = vec![
        vec![alpha.clone(), beta.clone(), &sigma - &alpha - &beta],
        vec![z(), delta.clone(), &sigma - &delta],
        vec![z(), z(), sigma],
    ];
    Ok(UrnSpec::deterministic(matrix, x))
}

fn three_colour(p: &Params) -> Result<UrnSpec, String> {
    require(p.get("alpha") > p.get("delta"), "this template needs alpha > delta")?;
    three_colour_checked(p)
}

fn three_colour_equal(p: &Params) -> Result<UrnSpec, String> {
    require(p.get("alpha") == p.get("delta"), "this template needs alpha = delta")?;
    three_colour_checked(p)
}

fn white_adds_black(p: &Params, black: ReplacementRow) -> Result<UrnSpec, String> {
    let (x1, x2) = (p.get("x1"), p.get("x2"));
    require(x1.is_positive() && x1.is_integer(), "x1 must be a positive integer")?;
    require(!x2.is_negative() && x2.is_integer(), "x2 must be a nonnegative integer")?;
    let rows = vec![ReplacementRow::deterministic(vec![int(0), int(1)]), black];
    Ok(labelled(UrnSpec::from_parts(unit(2), vec![x1, x2], rows), &["white", "black"]))
}

fn plus_minus(p: &Params) -> Result<UrnSpec, String> {
    let coin = ReplacementRow::new(vec![
        Atom::new(half(), vec![int(0), int(1)]),
        Atom::new(half(), vec![int(0), int(-1)]),
    ]);
    white_adds_black(p, coin)
}

fn minus_minus(p: &Params) -> Result<UrnSpec, String> {
    white_adds_black(p, ReplacementRow::deterministic(vec![int(0), int(-1)]))
}

fn dying_leaders(p: &Params) -> Result<UrnSpec, String> {
    let (a, b, g, d) = (p.int("alpha")?, p.int("beta")?, p.int("gamma")?, p.int("delta")?);
    require([a, b, g, d].iter().all(|v| *v > 0), "alpha, beta, gamma and delta must be positive integers")?;
    let (l1, l2) = (Rational::new(a, 2) - int(1), Rational::new(b, 2) - int(1));
    require(
        l1 == int(d) && l2 < l1 && int(g) < l2,
        "need alpha/2 - 1 = delta > beta/2 - 1 > gamma",
    )?;
    let quarter = Rational::new(1, 4);
    let subtracting = |own: usize, mult: i64| {
        let atoms = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(e1, e2)| {
                let mut v = vec![Rational::zero(); 4];
                v[own] = int(mult * e1 - 1);
                v[2] = int(e2);
                Atom::new(quarter.clone(), v)
            })
            .collect();
        ReplacementRow::new(atoms)
    };
    let z = Rational::zero;
    let rows = vec![
        subtracting(0, a),
        subtracting(1, b),
        ReplacementRow::deterministic(vec![z(), z(), int(g), z()]),
        ReplacementRow::deterministic(vec![z(), z(), z(), int(d)]),
    ];
    Ok(UrnSpec::from_parts(unit(4), vec![int(1), int(1), int(0), int(1)], rows))
}

fn strict(p: &Params) -> Result<UrnSpec, String> {
    require(p.get("x1").is_positive() && !p.get("x2").is_negative(), "need x1 > 0 and x2 >= 0")?;
    let mut spec = UrnSpec::deterministic(
        vec![vec![int(0), int(1)], vec![int(0), int(0)]],
        vec![p.get("x1"), p.get("x2")],
    );
    spec.colours[1].activity = Rational::zero();
    Ok(labelled(spec, &["source", "sink"]))
}

const E2_PARAMS_DEFAULT: [Param; 5] = [
    param("delta", "2", "white replacement of white"),
    param("gamma", "1", "black replacement of white"),
    param("alpha", "1", "black replacement of black (>= 0 or -1)"),
    param("x1", "1", "initial white"),
    param("x2", "0", "initial black"),
];

const X12: [Param; 2] = [param("x1", "1", "initial white"), param("x2", "0", "initial black")];

use Suite::*;

pub static TEMPLATES: &[Template] = &[
    Template {
        name: "classical",
        aliases: &["Eclassical"],
        summary: "classical Polya urn: each draw adds b balls of the drawn colour",
        params: &[
            param("colours", "2", "number of colours"),
            param("b", "1", "balls added per draw"),
            param("x", "1", "initial count of every colour"),
        ],
        suites: &[Convergence, Distribution, Moments, DrawnRatio, TotalActivity],
        build: classical,
    },
    Template {
        name: "diagonal",
        aliases: &["ED"],
        summary: "unbalanced diagonal urn with rates alpha and delta; limits lack high moments",
        params: &[
            param("alpha", "2", "white replacement of white"),
            param("delta", "1", "black replacement of black"),
            param("x1", "1", "initial white"),
            param("x2", "1", "initial black"),
        ],
        suites: &[Convergence, DrawnRatio, Martingale, Moments],
        build: diagonal,
    },
    Template {
        name: "two-colour",
        aliases: &["E2"],
        summary: "triangular two-colour urn ((delta, gamma), (0, alpha))",
        params: &E2_PARAMS_DEFAULT,
        suites: &[Convergence, TotalActivity, DrawnRatio, Shrinkage],
        build: two_colour_checked,
    },
    Template {
        name: "two-colour-equal",
        aliases: &["E2eq"],
        summary: "two-colour urn with alpha = delta; white carries a log correction",
        params: &[
            param("delta", "1", "white replacement of white"),
            param("gamma", "1", "black replacement of white"),
            param("alpha", "1", "black replacement of black, equal to delta"),
            X12[0],
            X12[1],
        ],
        suites: &[Convergence, TotalActivity],
        build: two_colour_equal,
    },
    Template {
        name: "two-colour-dominant",
        aliases: &["E2gt"],
        summary: "two-colour urn with alpha > delta; black dominates",
        params: &[
            param("delta", "1", "white replacement of white"),
            param("gamma", "1", "black replacement of white"),
            param("alpha", "3", "black replacement of black, above delta"),
            X12[0],
            X12[1],
        ],
        suites: &[Convergence, TotalActivity, DrawnRatio],
        build: two_colour_dominant,
    },
    Template {
        name: "two-colour-balanced",
        aliases: &["E2bal"],
        summary: "balanced two-colour urn with delta + gamma = alpha and explicit limit moments",
        params: &[
            param("delta", "1", "white replacement of white"),
            param("gamma", "1", "black replacement of white"),
            param("alpha", "2", "black replacement of black, equal to delta + gamma"),
            X12[0],
            X12[1],
        ],
        suites: &[Moments, Convergence, DrawnRatio, TotalActivity],
        build: two_colour_balanced,
    },
    Template {
        name: "random-two-colour",
        aliases: &["E2X"],
        summary: "two-colour urn whose white-on-white replacement is delta +- spread",
        params: &[
            param("delta", "2", "mean white replacement of white"),
            param("spread", "1", "half-width of the white replacement"),
            param("gamma", "1", "black replacement of white"),
            param("alpha", "1", "black replacement of black"),
            X12[0],
            X12[1],
        ],
        suites: &[Convergence, TotalActivity, DrawnRatio],
        build: random_two_colour,
    },
    Template {
        name: "random-bernoulli",
        aliases: &["E2p"],
        summary: "a white draw adds white with probability p, else black",
        params: &[
            param("p", "1/2", "probability of adding white"),
            param("x1", "2", "initial white"),
            param("x2", "1", "initial black"),
        ],
        suites: &[Moments, Convergence, DrawnRatio],
        build: random_bernoulli,
    },
    Template {
        name: "tree-percolation",
        aliases: &["E2p1"],
        summary: "root cluster of bond percolation on the random recursive tree",
        params: &[param("p", "1/2", "edge retention probability")],
        suites: &[Moments, Convergence],
        build: tree_percolation,
    },
    Template {
        name: "preferential",
        aliases: &["Epref"],
        summary: "root cluster of percolation on a preferential attachment tree",
        params: &[
            param("alpha", "1", "attachment weight per child, >= 0"),
            param("p", "1/2", "edge retention probability"),
        ],
        suites: &[Convergence, DrawnRatio, TotalActivity],
        build: preferential,
    },
    Template {
        name: "preferential-dary",
        aliases: &["Eprefminus", "Epref-"],
        summary: "root cluster of percolation on a random d-ary recursive tree (balls scaled by d)",
        params: &[
            param("d", "3", "arity, integer >= 2"),
            param("p", "1/2", "edge retention probability, d p > 1"),
        ],
        suites: &[Convergence, DrawnRatio],
        build: preferential_dary,
    },
    Template {
        name: "preferential-levels",
        aliases: &["Eprefk"],
        summary: "vertices by number of passive edges to the root in a percolated preferential tree",
        params: &[
            param("colours", "3", "number of levels plus one"),
            param("alpha", "1", "attachment weight per child, >= 0"),
            param("p", "1/2", "edge retention probability"),
        ],
        suites: &[Convergence, DrawnRatio],
        build: preferential_levels,
    },
    Template {
        name: "three-colour",
        aliases: &["E3"],
        summary: "balanced three-colour urn with alpha > delta",
        params: &[
            param("alpha", "3", "first colour replacement of itself"),
            param("beta", "2", "first colour replacement of the second"),
            param("delta", "1", "second colour replacement of itself, below alpha"),
            param("sigma", "6", "balance"),
            param("x1", "1", "initial first colour"),
            param("x2", "0", "initial second colour"),
            param("x3", "0", "initial third colour"),
        ],
        suites: &[Moments, Convergence, TotalActivity],
        build: three_colour,
    },
    Template {
        name: "three-colour-equal",
        aliases: &["E3eq"],
        summary: "balanced three-colour urn with alpha = delta; second colour has a log correction",
        params: &[
            param("alpha", "2", "first colour replacement of itself"),
            param("beta", "1", "first colour replacement of the second"),
            param("delta", "2", "second colour replacement of itself, equal to alpha"),
            param("sigma", "4", "balance"),
            param("x1", "1", "initial first colour"),
            param("x2", "0", "initial second colour"),
            param("x3", "0", "initial third colour"),
        ],
        suites: &[Moments, TotalActivity],
        build: three_colour_equal,
    },
    Template {
        name: "plus-minus",
        aliases: &["Eplusminus", "E+-"],
        summary: "white adds black; a black draw adds or removes a black ball with equal odds",
        params: &X12,
        suites: &[Distribution],
        build: plus_minus,
    },
    Template {
        name: "minus-minus",
        aliases: &["Eminusminus", "E--"],
        summary: "white adds black; a drawn black ball is discarded",
        params: &X12,
        suites: &[Distribution, Martingale],
        build: minus_minus,
    },
    Template {
        name: "dying-leaders",
        aliases: &["EcX0", "EcX=0"],
        summary: "four colours where two subtracting leaders may die out, so limits may vanish",
        params: &[
            param("alpha", "8", "first colour multiplier"),
            param("beta", "6", "second colour multiplier"),
            param("gamma", "1", "third colour rate"),
            param("delta", "3", "fourth colour rate, equal to alpha/2 - 1"),
        ],
        suites: &[Convergence, TotalActivity],
        build: dying_leaders,
    },
    Template {
        name: "strict",
        aliases: &[],
        summary: "strictly triangular urn: every draw of the source adds one inactive sink ball",
        params: &X12,
        suites: &[Convergence, DrawnRatio],
        build: strict,
    },
];

pub fn find_template(name: &str) -> Result<&'static Template, CorpusError> {
    TEMPLATES
        .iter()
        .find(|t| t.name.eq_ignore_ascii_case(name) || t.aliases.iter().any(|a| a.eq_ignore_ascii_case(name)))
        .ok_or_else(|| CorpusError::UnknownTemplate(name.to_string()))
}

impl Template {
    /// Resolves parameters from defaults and `overrides`, checks them and
    /// builds the spec. The parameters are recorded in the spec's `meta`.
    pub fn instantiate(&self, overrides: &[(String, String)]) -> Result<UrnSpec, CorpusError> {
        let mut values: BTreeMap<String, Rational> = self
            .params
            .iter()
            .map(|p| (p.name.to_string(), p.default.parse().expect("template defaults are valid")))
            .collect();
        for (name, raw) in overrides {
            let key = name.trim_start_matches("--").replace('-', "_");
            if !values.contains_key(&key) {
                return Err(CorpusError::UnknownParameter {
                    template: self.name.into(),
                    name: name.clone(),
                });
            }
            let v: Rational = raw.parse().map_err(|e| CorpusError::BadValue {
                template: self.name.into(),
                name: key.clone(),
                message: format!("{e}"),
            })?;
            values.insert(key, v);
        }
        let params = Params(values);
        let mut spec = (self.build)(&params).map_err(|message| CorpusError::Constraint {
            template: self.name.into(),
            message,
        })?;
        spec.meta.insert("template".into(), serde_json::Value::String(self.name.into()));
        let recorded: serde_json::Map<String, serde_json::Value> = params
            .0
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.to_string())))
            .collect();
        spec.meta.insert("parameters".into(), serde_json::Value::Object(recorded));
        Ok(spec)
    }

    pub fn default_spec(&self) -> UrnSpec {
        self.instantiate(&[]).expect("template defaults satisfy their constraints")
    }
}

/// Colours of every template instantiated at its defaults.
pub fn default_corpus() -> Vec<(&'static str, UrnSpec)> {
    TEMPLATES.iter().map(|t| (t.name, t.default_spec())).collect()
}
