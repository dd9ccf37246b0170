//! The JSON input document and its conversion into library values.
//!
//! Rationals are always strings (`"3"`, `"-2/7"`); magnitudes are written
//! by their exponent (`"1/2"` for `β^(1/2)`) or `"-inf"` for zero.

use berkline_core::curves::{
    Attachment, CurveModel, CurvePoint, DiskCoord, Edge, SkeletonPoint, TreeOfDisks, Vertex,
};
use berkline_core::fsderiv::{Domain, SeriesMap};
use berkline_core::rational;
use berkline_core::tropic::{Interval, TropicalPolygon};
use berkline_core::zalcman::{MapFamily, SampledFunction};
use berkline_core::{
    AbsValue, Backend, DiskPoint, FieldSpec, Poly, ProjPoint, Rational, ValueGroup, ValuedScalar,
};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::CliError;

type Schema<T> = Result<T, CliError>;

fn schema<T>(msg: impl Into<String>) -> Schema<T> {
    Err(CliError::Schema(msg.into()))
}

/// A rational written as a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map(Q).map_err(de::Error::custom)
    }
}

/// A magnitude written by its exponent, or `"-inf"` for zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mag(pub AbsValue);

impl Serialize for Mag {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Mag {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_mag(&s).map(Mag).map_err(de::Error::custom)
    }
}

pub fn parse_mag(s: &str) -> Result<AbsValue, String> {
    match s.trim() {
        "-inf" => Ok(AbsValue::Zero),
        t => rational::parse(t).map(AbsValue::Finite).map_err(|e| e.to_string()),
    }
}

/// A field element: a rational, or a Puiseux polynomial as a list of
/// `[exponent, coefficient]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Rational(Q),
    Series(Vec<(Q, Q)>),
}

impl ScalarDoc {
    pub fn to_scalar(&self, b: Backend) -> Schema<ValuedScalar> {
        match (self, b) {
            (ScalarDoc::Rational(q), _) => Ok(b.from_rational(q.0.clone())),
            (ScalarDoc::Series(pairs), Backend::Puiseux) => Ok(ValuedScalar::puiseux(
                pairs.iter().map(|(e, c)| (e.0.clone(), c.0.clone())),
            )),
            (ScalarDoc::Series(_), _) => schema(format!("series coefficients need the puiseux field, not {b}")),
        }
    }

    pub fn from_scalar(x: &ValuedScalar) -> Self {
        match x {
            ValuedScalar::Padic { value, .. } => ScalarDoc::Rational(Q(value.clone())),
            ValuedScalar::Puiseux(terms) => match terms.iter().collect::<Vec<_>>().as_slice() {
                [] => ScalarDoc::Rational(Q(rational::zero())),
                [(e, c)] if e == &&rational::zero() => ScalarDoc::Rational(Q((*c).clone())),
                _ => ScalarDoc::Series(terms.iter().map(|(e, c)| (Q(e.clone()), Q(c.clone()))).collect()),
            },
        }
    }
}

/// A Laurent polynomial as `[exponent, coefficient]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub terms: Vec<(i64, ScalarDoc)>,
    /// Log-radius interval `[lo, hi]`, `null` for an unbounded end.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<(Option<Q>, Option<Q>)>,
}

impl SeriesDoc {
    pub fn to_poly(&self, b: Backend) -> Schema<Poly> {
        let terms = self
            .terms
            .iter()
            .map(|(n, c)| Ok((*n, c.to_scalar(b)?)))
            .collect::<Schema<Vec<_>>>()?;
        let mut seen = std::collections::BTreeSet::new();
        if let Some((n, _)) = terms.iter().find(|(n, _)| !seen.insert(*n)) {
            return schema(format!("exponent {n} repeated"));
        }
        Ok(Poly::from_terms(b, terms)?)
    }

    pub fn interval(&self) -> Schema<Interval> {
        interval(&self.domain)
    }
}

fn interval(d: &Option<(Option<Q>, Option<Q>)>) -> Schema<Interval> {
    match d {
        None => Ok(Interval::everything()),
        Some((lo, hi)) => Ok(Interval::new(lo.clone().map(|q| q.0), hi.clone().map(|q| q.0))?),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainDoc {
    ProjectiveLine,
    AffineLine,
    Disk { radius: Mag, closed: bool },
    Annulus {
        inner: Mag,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outer: Option<Mag>,
    },
}

impl DomainDoc {
    pub fn to_domain(&self) -> Domain {
        match self {
            DomainDoc::ProjectiveLine => Domain::ProjectiveLine,
            DomainDoc::AffineLine => Domain::AffineLine,
            DomainDoc::Disk { radius, closed } => Domain::Disk {
                radius: radius.0.clone(),
                closed: *closed,
            },
            DomainDoc::Annulus { inner, outer } => Domain::Annulus {
                inner: inner.0.clone(),
                outer: outer.as_ref().map(|m| m.0.clone()),
            },
        }
    }
}

/// A map `[f_0 : … : f_N]`, each coordinate a Laurent polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub coords: Vec<Vec<(i64, ScalarDoc)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDoc>,
}

impl MapDoc {
    pub fn to_map(&self, b: Backend) -> Schema<SeriesMap> {
        let coords = self
            .coords
            .iter()
            .map(|terms| {
                SeriesDoc {
                    terms: terms.clone(),
                    domain: None,
                }
                .to_poly(b)
            })
            .collect::<Schema<Vec<_>>>()?;
        let domain = self.domain.as_ref().map_or(Domain::ProjectiveLine, DomainDoc::to_domain);
        Ok(SeriesMap::new(coords, domain)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalDoc {
    /// `[n, log|a_n|]` pairs.
    pub terms: Vec<(i64, Q)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<(Option<Q>, Option<Q>)>,
}

impl TropicalDoc {
    pub fn to_polygon(&self) -> Schema<TropicalPolygon> {
        let terms = self.terms.iter().map(|(n, v)| (*n, v.0.clone()));
        Ok(TropicalPolygon::new(terms, interval(&self.domain)?)?)
    }
}

/// A disk coordinate `Σ c_s u_s` as `[s, c]` pairs with `0 < s <= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoordDoc(pub Vec<(Q, Q)>);

impl CoordDoc {
    pub fn to_coord(&self) -> Schema<DiskCoord> {
        Ok(DiskCoord::new(self.0.iter().map(|(s, c)| (s.0.clone(), c.0.clone())))?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentDoc {
    pub first: String,
    pub at_first: CoordDoc,
    pub second: String,
    pub at_second: CoordDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkDoc {
    pub name: String,
    pub disk: String,
    pub at: CoordDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeDoc {
    /// The truncated chained-disks space with chains `3..=n`.
    Chained { chained_disks: u32 },
    Explicit {
        disks: Vec<String>,
        #[serde(default)]
        attachments: Vec<AttachmentDoc>,
        marks: Vec<MarkDoc>,
    },
}

impl TreeDoc {
    pub fn to_tree(&self) -> Schema<TreeOfDisks> {
        match self {
            TreeDoc::Chained { chained_disks } => Ok(TreeOfDisks::chained_disks(*chained_disks)?),
            TreeDoc::Explicit {
                disks,
                attachments,
                marks,
            } => {
                let attachments = attachments
                    .iter()
                    .map(|a| {
                        Ok(Attachment {
                            first: a.first.clone(),
                            at_first: a.at_first.to_coord()?,
                            second: a.second.clone(),
                            at_second: a.at_second.to_coord()?,
                        })
                    })
                    .collect::<Schema<Vec<_>>>()?;
                let marks = marks
                    .iter()
                    .map(|m| Ok((m.name.clone(), m.disk.clone(), m.at.to_coord()?)))
                    .collect::<Schema<Vec<_>>>()?;
                Ok(TreeOfDisks::new(disks.clone(), attachments, marks)?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub name: String,
    #[serde(default)]
    pub genus: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub extra_directions: u64,
    #[serde(default, skip_serializing_if = "is_false")]
    pub boundary: bool,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub ends: (String, String),
    pub length: Q,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SkeletonPointDoc {
    Vertex { vertex: String },
    Edge { edge: usize, position: Q },
}

impl SkeletonPointDoc {
    pub fn to_point(&self) -> SkeletonPoint {
        match self {
            SkeletonPointDoc::Vertex { vertex } => SkeletonPoint::Vertex(vertex.clone()),
            SkeletonPointDoc::Edge { edge, position } => SkeletonPoint::Edge {
                edge: *edge,
                position: position.0.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskDoc {
    pub name: String,
    pub at: SkeletonPointDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePointDoc {
    pub name: String,
    pub component: String,
    pub at: CoordDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDoc {
    #[serde(default)]
    pub vertices: Vec<VertexDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub punctures: Vec<SkeletonPointDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<DiskDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<CurvePointDoc>,
}

impl CurveDoc {
    pub fn to_model(&self) -> Result<CurveModel, berkline_core::Error> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Vertex {
                name: v.name.clone(),
                genus: v.genus,
                extra_directions: v.extra_directions,
                boundary: v.boundary,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(&e.ends.0, &e.ends.1, e.length.0.clone()))
            .collect();
        let punctures = self.punctures.iter().map(SkeletonPointDoc::to_point).collect();
        let disks = self.disks.iter().map(|d| (d.name.clone(), d.at.to_point())).collect();
        CurveModel::new(vertices, edges, punctures, disks)
    }

    pub fn point(&self, name: &str) -> Schema<CurvePoint> {
        let p = self
            .points
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| CliError::Schema(format!("no point named {name}")))?;
        Ok(CurvePoint {
            component: p.component.clone(),
            coordinate: p.at.to_coord()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDoc {
    pub points: Vec<ScalarDoc>,
    pub values: Vec<Q>,
    /// Index of the starting point in `points`.
    pub start: usize,
    pub epsilon: Q,
    pub tau: Q,
}

impl SampleDoc {
    pub fn to_sample(&self, b: Backend) -> Schema<SampledFunction> {
        let points = self
            .points
            .iter()
            .map(|p| p.to_scalar(b))
            .collect::<Schema<Vec<_>>>()?;
        let values = self.values.iter().map(|v| v.0.clone()).collect();
        Ok(SampledFunction::new(points, values)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MembersDoc {
    /// `f_n = [1 : T/p^n]` for `n = 1..=n_max` over the field's `p`.
    InverseScaling { inverse_scaling: u32 },
    Explicit { maps: Vec<MapDoc> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub members: MembersDoc,
    pub witnesses: Vec<ScalarDoc>,
    pub samples: Vec<Vec<ScalarDoc>>,
}

impl FamilyDoc {
    pub fn to_family(&self, b: Backend) -> Schema<MapFamily> {
        match (&self.members, b) {
            (MembersDoc::InverseScaling { inverse_scaling }, Backend::Padic(p)) => {
                Ok(MapFamily::inverse_scaling(p, *inverse_scaling)?)
            }
            (MembersDoc::InverseScaling { .. }, _) => schema("inverse_scaling needs a padic field"),
            (MembersDoc::Explicit { maps }, _) => {
                let maps = maps.iter().map(|m| m.to_map(b)).collect::<Schema<Vec<_>>>()?;
                Ok(MapFamily::new(maps)?)
            }
        }
    }

    pub fn witnesses(&self, b: Backend) -> Schema<Vec<ValuedScalar>> {
        self.witnesses.iter().map(|w| w.to_scalar(b)).collect()
    }

    pub fn samples(&self, b: Backend) -> Schema<Vec<Vec<ValuedScalar>>> {
        self.samples
            .iter()
            .map(|s| s.iter().map(|x| x.to_scalar(b)).collect())
            .collect()
    }
}

/// A point of `P^1`: `"inf"`, or a disk `{center, radius}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Disk { center: ScalarDoc, radius: Mag },
    Named(String),
}

impl PointDoc {
    pub fn to_point(&self, b: Backend) -> Schema<ProjPoint> {
        match self {
            PointDoc::Named(s) if s == "inf" => Ok(ProjPoint::infinity(b)),
            PointDoc::Named(s) => schema(format!("unknown point {s:?}")),
            PointDoc::Disk { center, radius } => Ok(ProjPoint::Affine(DiskPoint::new(
                center.to_scalar(b)?,
                radius.0.clone(),
            ))),
        }
    }

    /// Parses the `--point` flag: `inf`, or `a,r` with `a` a rational and
    /// `r` a log-radius or `-inf`.
    pub fn parse_flag(s: &str) -> Result<Self, String> {
        if s.trim() == "inf" {
            return Ok(PointDoc::Named("inf".into()));
        }
        let (a, r) = s
            .split_once(',')
            .ok_or_else(|| format!("--point expects a,r or inf, got {s:?}"))?;
        let center = rational::parse(a.trim()).map_err(|e| e.to_string())?;
        Ok(PointDoc::Disk {
            center: ScalarDoc::Rational(Q(center)),
            radius: Mag(parse_mag(r)?),
        })
    }
}

/// A complete input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Document {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tropical: Option<TropicalDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_of_disks: Option<TreeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_model: Option<CurveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_function: Option<SampleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointDoc>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        let doc: Document = serde_json::from_str(text)?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Checks that at most one payload block is present.
    pub fn validate(&self) -> Schema<()> {
        let present = [
            self.series.is_some(),
            self.map.is_some(),
            self.tropical.is_some(),
            self.tree_of_disks.is_some(),
            self.curve_model.is_some(),
            self.sample_function.is_some(),
            self.family.is_some(),
        ];
        if present.iter().filter(|p| **p).count() > 1 {
            return schema("a document holds one payload block");
        }
        Ok(())
    }

    /// The field, with `--field` taking precedence over the document.
    pub fn field(&self, flag: Option<&str>) -> Schema<FieldSpec> {
        let name = flag
            .or(self.field.as_deref())
            .ok_or_else(|| CliError::Schema("no field given (use \"field\" or --field)".into()))?;
        let spec = FieldSpec::parse(name)?;
        match &self.value_group {
            None => Ok(spec),
            Some(g) => Ok(spec.with_value_group(ValueGroup::parse(g)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use berkline_core::rational::frac;

    #[test]
    fn rationals_are_strings() {
        let q: Q = serde_json::from_str("\"-6/4\"").unwrap();
        assert_eq!(q.0, frac(-3, 2));
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"-3/2\"");
        assert!(serde_json::from_str::<Q>("1.5").is_err());
        assert!(serde_json::from_str::<Q>("\"1/0\"").is_err());
    }

    #[test]
    fn magnitudes() {
        assert_eq!(parse_mag("-inf").unwrap(), AbsValue::Zero);
        assert_eq!(parse_mag(" 2/3 ").unwrap(), AbsValue::Finite(frac(2, 3)));
        assert!(parse_mag("inf").is_err());
    }

    #[test]
    fn point_flags() {
        assert_eq!(PointDoc::parse_flag("inf").unwrap(), PointDoc::Named("inf".into()));
        assert_eq!(
            PointDoc::parse_flag("-1/2,-inf").unwrap(),
            PointDoc::Disk {
                center: ScalarDoc::Rational(Q(frac(-1, 2))),
                radius: Mag(AbsValue::Zero),
            }
        );
        assert!(PointDoc::parse_flag("3").is_err());
        assert!(PointDoc::parse_flag("x,1").is_err());
    }

    #[test]
    fn puiseux_scalars() {
        let s: ScalarDoc = serde_json::from_str(r#"[["1/2", "3"], ["0", "-1"]]"#).unwrap();
        let x = s.to_scalar(Backend::Puiseux).unwrap();
        assert_eq!(x.abs(), AbsValue::Finite(frac(0, 1)));
        assert!(s.to_scalar(Backend::Padic(3)).is_err());
        assert_eq!(ScalarDoc::from_scalar(&Backend::Puiseux.from_int(4)), ScalarDoc::Rational(Q(frac(4, 1))));
    }

    #[test]
    fn repeated_exponents_are_rejected() {
        let s = SeriesDoc {
            terms: vec![(1, ScalarDoc::Rational(Q(frac(1, 1)))), (1, ScalarDoc::Rational(Q(frac(2, 1))))],
            domain: None,
        };
        assert!(matches!(s.to_poly(Backend::Padic(5)), Err(CliError::Schema(_))));
    }

    #[test]
    fn one_payload_per_document() {
        let doc = Document::parse(
            r#"{"tropical": {"terms": [[0, "0"]]}, "series": {"terms": [[0, "1"]]}}"#,
        )
        .unwrap();
        assert!(doc.validate().is_err());
    }

    #[test]
    fn field_resolution() {
        let doc = Document::parse(r#"{"field": "padic:5", "value-group": "1/2 Z"}"#).unwrap();
        assert_eq!(doc.field(None).unwrap().backend(), Backend::Padic(5));
        assert_eq!(doc.field(Some("puiseux")).unwrap().backend(), Backend::Puiseux);
        assert!(matches!(Document::default().field(None), Err(CliError::Schema(_))));
        assert!(matches!(doc.field(Some("padic:6")), Err(CliError::Domain(_))));
    }

    #[test]
    fn chained_tree() {
        let doc = Document::parse(r#"{"tree-of-disks": {"chained_disks": 4}}"#).unwrap();
        let t = doc.tree_of_disks.unwrap().to_tree().unwrap();
        assert!(t.marks().contains_key("x") && t.marks().contains_key("y"));
    }
}
