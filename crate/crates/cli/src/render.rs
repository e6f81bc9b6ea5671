//! Text, LaTeX and JSON renderings of mined relations.

use polyzeta::bridge::{MinerReport, RelationRule, Side};
use polyzeta::coeff::{fmt_q, parse_q};
use polyzeta::{Monomial, Poly, Symbol, Q};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Latex,
}

/// One rule in the JSON schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleJson {
    pub weight: usize,
    pub side: String,
    pub lhs: String,
    pub rhs: String,
    pub rhs_terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub monomial: Vec<(String, u32)>,
}

/// Terms in the same order as [`Poly::render_with`].
fn sorted_terms(p: &Poly) -> Vec<(&Monomial, &Q)> {
    let mut items: Vec<(&Monomial, &Q)> = p.terms().collect();
    items.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
    items
}

pub fn rule_to_json(r: &RelationRule) -> RuleJson {
    RuleJson {
        weight: r.weight,
        side: r.side.name().to_string(),
        lhs: r.lhs.basis_name(),
        rhs: r.rhs.render_with(&Symbol::basis_name),
        rhs_terms: sorted_terms(&r.rhs)
            .into_iter()
            .map(|(m, c)| TermJson {
                coeff: fmt_q(c),
                monomial: m.pairs().iter().map(|(s, e)| (s.basis_name(), *e)).collect(),
            })
            .collect(),
    }
}

pub fn rule_from_json(j: &RuleJson) -> Result<RelationRule, String> {
    let side = match j.side.as_str() {
        "Y" => Side::Y,
        "X" => Side::X,
        s => return Err(format!("bad side \"{s}\"")),
    };
    let sym = |t: &str| Symbol::parse(t).ok_or_else(|| format!("bad symbol \"{t}\""));
    let mut rhs = Poly::default();
    for t in &j.rhs_terms {
        let c = parse_q(&t.coeff).ok_or_else(|| format!("bad coefficient \"{}\"", t.coeff))?;
        let pairs = t.monomial.iter().map(|(s, e)| Ok((sym(s)?, *e))).collect::<Result<Vec<_>, String>>()?;
        rhs.add_term(Monomial::from_pairs(pairs), c);
    }
    Ok(RelationRule { side, lhs: sym(&j.lhs)?, rhs, weight: j.weight })
}

pub fn rules_to_json(rules: &[&RelationRule]) -> String {
    let v: Vec<RuleJson> = rules.iter().map(|r| rule_to_json(r)).collect();
    serde_json::to_string_pretty(&v).expect("rules serialize")
}

pub fn rules_from_json(text: &str) -> Result<Vec<RelationRule>, String> {
    let v: Vec<RuleJson> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    v.iter().map(rule_from_json).collect()
}

/// `3/2*Sigma[y3]` → `3/2 Sigma[y3]`.
pub fn table_rhs(p: &Poly) -> String {
    p.render_with(&Symbol::basis_name).replace('*', " ")
}

pub const TABLE_HEADER: &str = "weight | lhs -> rhs";

fn sides(side: Option<Side>) -> Vec<Side> {
    side.map_or(vec![Side::Y, Side::X], |s| vec![s])
}

/// `side = None` means both, Y first.
pub fn render_table(report: &MinerReport, side: Option<Side>, format: Format) -> String {
    let chosen = sides(side);
    match format {
        Format::Json => {
            let rules: Vec<&RelationRule> = chosen.iter().flat_map(|&s| report.rules(s)).collect();
            rules_to_json(&rules) + "\n"
        }
        Format::Table => {
            let mut out = String::new();
            for s in chosen {
                out += &format!("# {} side\n{TABLE_HEADER}\n", s.name());
                for r in report.rules(s) {
                    out += &format!("{} | {} -> {}\n", r.weight, r.lhs.basis_name(), table_rhs(&r.rhs));
                }
                let irr = report.irreducibles(s);
                if !irr.is_empty() {
                    let names: Vec<String> = irr.iter().map(Symbol::basis_name).collect();
                    out += &format!("irreducible: {}\n", names.join(", "));
                }
            }
            out
        }
        Format::Latex => {
            let mut out = String::new();
            for s in chosen {
                out += "\\begin{array}{|c|l|}\n\\hline\n\\text{weight} & \\text{rule} \\\\\n\\hline\n";
                for r in report.rules(s) {
                    out += &format!("{} & {} \\to {} \\\\\n", r.weight, latex_symbol(&r.lhs), latex_poly(&r.rhs));
                }
                out += "\\hline\n\\end{array}\n";
            }
            out
        }
    }
}

fn latex_symbol(s: &Symbol) -> String {
    match s {
        Symbol::ZetaY(w) => {
            let letters: String = w.indices().iter().map(|i| format!("y_{{{i}}}")).collect();
            format!("\\Sigma_{{{letters}}}")
        }
        Symbol::ZetaX(w) => {
            let letters: String = w.indices().iter().map(|i| format!("x_{i}")).collect();
            format!("S_{{{letters}}}")
        }
        Symbol::Gamma => "\\gamma".into(),
        Symbol::T => "t".into(),
    }
}

fn latex_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
    }
}

fn latex_poly(p: &Poly) -> String {
    let items = sorted_terms(p);
    if items.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, (m, c)) in items.into_iter().enumerate() {
        let neg = c < &Q::from_integer(0.into());
        let a = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let body: String = m
            .pairs()
            .iter()
            .map(|(sym, e)| if *e == 1 { latex_symbol(sym) } else { format!("{}^{{{e}}}", latex_symbol(sym)) })
            .collect();
        if m.is_one() {
            s += &latex_q(&a);
        } else if a == Q::from_integer(1.into()) {
            s += &body;
        } else {
            s += &latex_q(&a);
            s += &body;
        }
    }
    s
}
