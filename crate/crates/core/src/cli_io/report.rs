use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arith::PPower;
use crate::euler_characteristic::{EulerCharResult, FieldLocalData, HypothesisReport, SignVector};
use crate::global_invariants::{TorsionInfo, TorsionVerdict};
use crate::local_analysis::LocalData;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub sha_p_order: PPower,
    pub sha_defaulted: bool,
    pub selmer_finite_asserted: bool,
    pub signs: SignVector,
    pub signs_defaulted: bool,
    pub override_hypotheses: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub label: Option<String>,
    /// Input coefficients, absent for field data.
    pub curve: Option<String>,
    pub minimal_model: Option<String>,
    pub p: u64,
    pub local: Vec<LocalData>,
    pub torsion: Option<TorsionInfo>,
    pub torsion_check: Option<TorsionVerdict>,
    pub field_data: FieldLocalData,
    pub hypotheses: HypothesisReport,
    pub result: Option<EulerCharResult>,
    pub failure: Option<String>,
    pub input: InputEcho,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let p = self.p;
        let row = |s: &mut String, k: &str, v: &str| {
            let _ = writeln!(s, "{k:<22}{v}");
        };
        if let Some(l) = &self.label {
            row(&mut s, "label", l);
        }
        if let Some(c) = &self.curve {
            row(&mut s, "curve", c);
        }
        if let Some(m) = &self.minimal_model {
            row(&mut s, "minimal model", m);
        }
        row(&mut s, "p", &p.to_string());
        row(&mut s, "signs", &self.input.signs.to_string());
        let sha_note = if self.input.sha_defaulted { " (default)" } else { "" };
        row(&mut s, &format!("|Sha({p})|"), &format!("{}{sha_note}", self.input.sha_p_order));

        if !self.local.is_empty() {
            let _ = writeln!(s);
            let _ = writeln!(
                s,
                "{:<12}{:<26}{:<9}{:>4}{:>6}{:>8}{:>10}{:>10}",
                "q", "reduction", "kodaira", "f", "c", "a_q", "c^(p)", "d^(p)"
            );
            for l in &self.local {
                let a = l.a_q.map_or("-".to_string(), |a| a.to_string());
                let d = l.d_p_part(p).map_or("-".to_string(), |d| d.to_string());
                let _ = writeln!(
                    s,
                    "{:<12}{:<26}{:<9}{:>4}{:>6}{:>8}{:>10}{:>10}",
                    l.q.to_string(),
                    l.reduction_type.as_str(),
                    l.kodaira.to_string(),
                    l.conductor_exp,
                    l.tamagawa,
                    a,
                    l.tamagawa_p_part(p).to_string(),
                    d
                );
            }
        } else {
            let _ = writeln!(s);
            for (i, w) in self.field_data.primes_above_p.iter().enumerate() {
                let d = w.d_p_part.map_or("-".to_string(), |d| d.to_string());
                let a = w.a.map_or("-".to_string(), |a| a.to_string());
                let _ = writeln!(
                    s,
                    "w{:<3} e={} f={} {:<20} a={:<4} d^(p)={}",
                    i + 1,
                    w.ramification,
                    w.residue_degree,
                    w.reduction.as_str(),
                    a,
                    d
                );
            }
        }
        let _ = writeln!(s);
        if let Some(t) = &self.torsion {
            row(&mut s, "torsion", &format!("{} ({p}-part {})", t.group_structure, t.p_part(p)));
        } else {
            row(&mut s, "torsion p-part", &self.field_data.torsion_p_part.to_string());
        }
        let h = &self.hypotheses;
        row(&mut s, "S1", &h.s1.to_string());
        row(&mut s, "S2", &h.s2.to_string());
        row(&mut s, "S3", &h.s3.to_string());
        row(&mut s, "S4", &h.s4.to_string());
        let fin = match h.selmer_finiteness {
            crate::euler_characteristic::SelmerFiniteness::Asserted => "asserted",
            crate::euler_characteristic::SelmerFiniteness::NotAsserted => "NOT asserted",
        };
        row(&mut s, "Sel(E/F) finite", fin);
        let _ = writeln!(s);
        match (&self.result, &self.failure) {
            (Some(r), _) => {
                row(&mut s, "chi", &r.chi.to_string());
                let b = &r.breakdown;
                row(&mut s, "  sha", &b.sha_p.to_string());
                row(&mut s, "  torsion^2", &b.torsion_p_sq.to_string());
                row(&mut s, "  tamagawa product", &b.tamagawa_product_p_part.to_string());
                row(&mut s, "  ordinary d^2", &b.ordinary_d_sq_product.to_string());
                for n in &r.notes {
                    let _ = writeln!(s, "note: {n}");
                }
            }
            (None, Some(f)) => row(&mut s, "chi", &format!("not computed: {f}")),
            (None, None) => row(&mut s, "chi", "not computed"),
        }
        for n in &h.notes {
            if self.result.as_ref().is_none_or(|r| !r.notes.contains(n)) {
                let _ = writeln!(s, "note: {n}");
            }
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

/// Plain-text rendering of local data at one prime.
pub fn render_local(l: &LocalData, p: Option<u64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<16}{}", "q", l.q);
    let _ = writeln!(s, "{:<16}{}", "reduction", l.reduction_type);
    let _ = writeln!(s, "{:<16}{}", "kodaira", l.kodaira);
    let _ = writeln!(s, "{:<16}{}", "conductor exp", l.conductor_exp);
    let _ = writeln!(s, "{:<16}{}", "tamagawa", l.tamagawa);
    if let Some(a) = l.a_q {
        let _ = writeln!(s, "{:<16}{}", "a_q", a);
        if let Some(n) = l.reduced_order() {
            let _ = writeln!(s, "{:<16}{}", "|E(F_q)|", n);
        }
    }
    if let Some(p) = p {
        let _ = writeln!(s, "{:<16}{}", format!("c^({p})"), l.tamagawa_p_part(p));
        if let Some(d) = l.d_p_part(p) {
            let _ = writeln!(s, "{:<16}{}", format!("d^({p})"), d);
        }
    }
    s
}
