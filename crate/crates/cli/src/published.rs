//! Reproduction of the published, desk-checkable claims.

use quadapn::boolfun::{Spectrum, Vbf};
use quadapn::classes::{canonical_classes, filter_admissible, kind_counts};
use quadapn::known;
use quadapn::Error;

pub struct Claim {
    pub name: String,
    pub expected: String,
    pub got: String,
}

impl Claim {
    fn new(name: &str, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Claim { name: name.into(), expected: expected.into(), got: got.into() }
    }

    pub fn passed(&self) -> bool {
        self.expected == self.got
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        format!("{verdict} {} expected={} got={}", self.name, self.expected, self.got)
    }
}

/// `"<total> (<both>/<b-id>/<a-id>)"` for the canonical classes of `n`.
pub fn class_summary(n: usize) -> Result<(String, usize), Error> {
    let classes = canonical_classes(n)?;
    let (p, bi, ai) = kind_counts(&classes);
    Ok((format!("{} ({p}/{bi}/{ai})", classes.len()), filter_admissible(&classes, None).len()))
}

fn profile(f: &Vbf, with_permutation: bool) -> String {
    let apn = if f.is_apn() { "apn" } else { "not-apn" };
    let base = format!("{apn},degree={}", f.algebraic_degree());
    if with_permutation {
        format!("{},{base}", if f.is_permutation() { "bijective" } else { "not-bijective" })
    } else {
        base
    }
}

pub fn claims() -> Result<Vec<Claim>, Error> {
    let mut out = Vec::new();
    for (n, expected) in [(7, "128 (56/36/36)"), (8, "157 (75/41/41)"), (9, "217 (111/53/53)"), (10, "401 (247/77/77)")] {
        let (summary, admissible) = class_summary(n)?;
        out.push(Claim::new(&format!("classes-n{n}"), expected, summary));
        match n {
            7 => out.push(Claim::new("admissible-n7", "53", admissible.to_string())),
            8 => out.push(Claim::new("admissible-n8", "67", admissible.to_string())),
            _ => {}
        }
    }
    out.push(Claim::new("permutation-9a", "bijective,apn,degree=2", profile(&known::permutation_9a(), true)));
    out.push(Claim::new("permutation-9b", "bijective,apn,degree=2", profile(&known::permutation_9b(), true)));

    let lin = known::linearity_128();
    out.push(Claim::new("linearity-128-profile", "apn,degree=2", profile(&lin, false)));
    out.push(Claim::new("linearity-128-value", "128", lin.linearity().to_string()));
    let w5 = Spectrum::from_pairs(&[(0, 12540), (16, 48640), (32, 4096), (128, 4)]);
    out.push(Claim::new("linearity-128-spectrum", w5.canonical(), lin.extended_walsh_spectrum().canonical()));

    let w0 = Spectrum::from_pairs(&[(0, 16320), (16, 43520), (32, 5440)]);
    out.push(Claim::new("cube-n8-spectrum", w0.canonical(), known::power_map(8, 3).extended_walsh_spectrum().canonical()));

    let kim = known::kim_mapping();
    out.push(Claim::new("kim-profile", "apn,degree=2", profile(&kim, false)));
    let poly = known::field_6().lut_to_univariate(&kim)?;
    let residues: Vec<String> = poly.exponents().iter().map(|e| (e % 7).to_string()).collect();
    let got = if residues.iter().all(|r| r == "3") { "all=3".to_string() } else { format!("residues={}", residues.join(",")) };
    out.push(Claim::new("kim-exponents-mod-7", "all=3", got));
    Ok(out)
}
