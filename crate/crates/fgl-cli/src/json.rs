//! JSON wire formats. Coefficients travel as decimal strings, never
//! floats; series terms are emitted in graded-lex order so identical
//! inputs give byte-identical files.

use fgl_core::certify::TameCertificate;
use fgl_core::curve::HyperellipticSextic;
use fgl_core::fgl::{FormalGroupLaw, MulByM, Provenance};
use fgl_core::hensel::HenselLift;
use fgl_core::ring::{Ring, Val};
use fgl_core::series::TruncatedSeries;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermDto {
    pub e: Vec<u16>,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeriesDto {
    pub ell: u64,
    pub prec: u32,
    pub nvars: u8,
    pub cap: u16,
    pub terms: Vec<TermDto>,
}

impl SeriesDto {
    pub fn from_series(s: &TruncatedSeries) -> Self {
        SeriesDto {
            ell: s.ring().ell(),
            prec: s.ring().prec(),
            nvars: s.nvars(),
            cap: s.cap(),
            terms: s
                .iter()
                .map(|(m, c)| TermDto {
                    e: m.exps(s.nvars()),
                    c: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<TruncatedSeries, String> {
        let ring = Ring::new(self.ell, self.prec).map_err(|e| e.to_string())?;
        let mut out = TruncatedSeries::zero(ring, self.nvars, self.cap);
        for t in &self.terms {
            let c: u128 = t.c.parse().map_err(|_| format!("bad coefficient {}", t.c))?;
            if t.e.len() != self.nvars as usize {
                return Err(format!("exponent arity {} != {}", t.e.len(), self.nvars));
            }
            let m = fgl_core::series::Mono::from_exps(&t.e).map_err(|e| e.to_string())?;
            out.add_assign_term(m, c);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingDto {
    pub ell: u64,
    pub prec: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawDto {
    pub schema_version: String,
    pub dim: u8,
    pub ring: RingDto,
    pub cap: u16,
    pub laws: Vec<SeriesDto>,
    pub provenance: String,
}

impl LawDto {
    pub fn from_law(law: &FormalGroupLaw) -> Self {
        LawDto {
            schema_version: SCHEMA_VERSION.into(),
            dim: law.dim(),
            ring: RingDto {
                ell: law.ring().ell(),
                prec: law.ring().prec(),
            },
            cap: law.cap(),
            laws: law.coords().iter().map(SeriesDto::from_series).collect(),
            provenance: law.provenance().label(),
        }
    }

    pub fn to_law(&self) -> Result<FormalGroupLaw, String> {
        let ring = Ring::new(self.ring.ell, self.ring.prec).map_err(|e| e.to_string())?;
        let coords = self
            .laws
            .iter()
            .map(|s| s.to_series())
            .collect::<Result<Vec<_>, _>>()?;
        FormalGroupLaw::from_raw(ring, self.dim, coords, Provenance::Other(self.provenance.clone()))
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MulDto {
    pub schema_version: String,
    pub m: u64,
    pub ring: RingDto,
    pub maps: Vec<SeriesDto>,
}

impl MulDto {
    pub fn from_mul(ring: Ring, mul: &MulByM) -> Self {
        MulDto {
            schema_version: SCHEMA_VERSION.into(),
            m: mul.m,
            ring: RingDto {
                ell: ring.ell(),
                prec: ring.prec(),
            },
            maps: mul.maps.iter().map(SeriesDto::from_series).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChecklistEntryDto {
    pub hypothesis: String,
    pub anchor: String,
    pub pass: bool,
    pub witness: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDto {
    pub schema_version: String,
    pub subject: String,
    pub ell: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    pub verdict: String,
    pub checklist: Vec<ChecklistEntryDto>,
    pub theorem_trail: Vec<String>,
}

impl CertificateDto {
    pub fn from_cert(cert: &TameCertificate) -> Self {
        CertificateDto {
            schema_version: SCHEMA_VERSION.into(),
            subject: cert.subject.clone(),
            ell: cert.ell,
            alpha: cert.alpha.map(|a| format!("{}/{}", a.num(), a.den())),
            verdict: cert.verdict.as_str().into(),
            checklist: cert
                .checklist
                .iter()
                .map(|c| ChecklistEntryDto {
                    hypothesis: c.name.clone(),
                    anchor: c.anchor.into(),
                    pass: c.pass,
                    witness: c.witness.clone(),
                })
                .collect(),
            theorem_trail: cert.trail.iter().map(|t| t.as_str().into()).collect(),
        }
    }
}

/// Human-readable rendering of a certificate checklist.
pub fn render_certificate_report(cert: &TameCertificate) -> String {
    let mut out = String::new();
    out.push_str(&format!("subject: {}\n", cert.subject));
    out.push_str(&format!("ell: {}\n", cert.ell));
    out.push_str(&format!("verdict: {}\n", cert.verdict));
    if let Some(a) = cert.alpha {
        out.push_str(&format!("alpha: {a}\n"));
    }
    out.push_str("checklist:\n");
    for c in &cert.checklist {
        out.push_str(&format!(
            "  [{}] {} ({}) — {}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.anchor,
            c.witness
        ));
    }
    out.push_str("cited results: ");
    out.push_str(
        &cert
            .trail
            .iter()
            .map(|t| t.as_str().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    );
    out.push('\n');
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveDto {
    pub ell: u64,
    pub coeffs: Vec<String>,
}

impl CurveDto {
    pub fn from_sextic(s: &HyperellipticSextic) -> Self {
        CurveDto {
            ell: s.ell(),
            coeffs: s.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveWithCertificateDto {
    pub schema_version: String,
    pub curve: CurveDto,
    pub certificate: CertificateDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeuringDto {
    pub ell: u64,
    /// Ascending degree, decimal strings.
    pub coeffs: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorDto {
    pub ell: u64,
    pub a: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaDto {
    pub value: String,
    pub field: String,
    pub half_sum_form_vanishes: bool,
    pub literal_form_vanishes: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseCurveDto {
    pub ell: u64,
    pub a: u64,
    pub b: u64,
    pub curve: String,
    pub delta_g: String,
    pub lambda: LambdaDto,
    pub point_count: u64,
    pub trace: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HenselSystemDto {
    pub series: Vec<SeriesDto>,
    pub start: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jacobian_det: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HenselResultDto {
    pub schema_version: String,
    pub root: Vec<String>,
    pub root_precision: u32,
    pub iterations: u32,
    pub residual_valuations: Vec<String>,
    pub jacobian_valuation: u32,
}

impl HenselResultDto {
    pub fn from_lift(lift: &HenselLift) -> Self {
        HenselResultDto {
            schema_version: SCHEMA_VERSION.into(),
            root: lift.root.iter().map(|c| c.residue().to_string()).collect(),
            root_precision: lift.root[0].ring().prec(),
            iterations: lift.iterations,
            residual_valuations: lift
                .residual_val
                .iter()
                .map(|v| match v {
                    Val::Exact(x) => x.to_string(),
                    Val::AtLeast(x) => format!(">={x}"),
                })
                .collect(),
            jacobian_valuation: lift.jacobian_val,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeightDto {
    pub ell: u64,
    pub law: String,
    pub height: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RDto {
    pub r: u32,
}
