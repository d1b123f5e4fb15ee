//! Labelled cluster configurations in `R^d` with exact rational coordinates.
//!
//! Clusters are stored in insertion order; equality compares canonical
//! forms (points sorted inside each cluster, clusters sorted), so two
//! configurations that differ only by relabelling particles are equal.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::partitions::Partition;
use crate::{Error, Result};

pub type Point = Vec<BigRational>;

/// Index into a label set of the matching cluster size; `0` is the
/// basepoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl Label {
    pub const BASEPOINT: Label = Label(0);

    pub fn is_basepoint(self) -> bool {
        self == Label::BASEPOINT
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cluster {
    pub points: Vec<Point>,
    pub label: Label,
}

impl Cluster {
    pub fn new(points: Vec<Point>, label: Label) -> Self {
        Cluster { points, label }
    }

    fn min_first(&self) -> &BigRational {
        self.points
            .iter()
            .map(|p| &p[0])
            .min()
            .expect("clusters are non-empty")
    }
}

/// Closed interval of the first coordinate; `None` ends are infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<BigRational>,
    pub hi: Option<BigRational>,
}

impl Interval {
    pub fn closed(lo: BigRational, hi: BigRational) -> Self {
        Interval {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo.as_ref().is_none_or(|a| a <= x) && self.hi.as_ref().is_none_or(|b| x <= b)
    }

    fn endpoints(&self) -> impl Iterator<Item = &BigRational> {
        self.lo.iter().chain(self.hi.iter())
    }
}

/// A configuration of labelled clusters in `R^d`.
///
/// With `p >= 1` every cluster is vertical: its points share their first
/// `p` coordinates.
#[derive(Clone, Debug)]
pub struct ClusterConfiguration {
    d: usize,
    p: usize,
    clusters: Vec<Cluster>,
}

impl ClusterConfiguration {
    pub fn new(d: usize, p: usize, clusters: Vec<Cluster>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidConfiguration("dimension must be positive".into()));
        }
        if p > d {
            return Err(Error::InvalidConfiguration(format!(
                "verticality p = {p} exceeds d = {d}"
            )));
        }
        let mut seen = BTreeSet::new();
        for (i, c) in clusters.iter().enumerate() {
            if c.points.is_empty() {
                return Err(Error::InvalidConfiguration(format!("cluster {i} is empty")));
            }
            for pt in &c.points {
                if pt.len() != d {
                    return Err(Error::InvalidConfiguration(format!(
                        "point of dimension {} in R^{d}",
                        pt.len()
                    )));
                }
                if !seen.insert(pt) {
                    return Err(Error::InvalidConfiguration(format!(
                        "particle {} occurs twice",
                        format_point(pt)
                    )));
                }
                if pt[..p] != c.points[0][..p] {
                    return Err(Error::InvalidConfiguration(format!(
                        "cluster {i} is not vertical for p = {p}"
                    )));
                }
            }
        }
        Ok(ClusterConfiguration { d, p, clusters })
    }

    pub fn empty(d: usize, p: usize) -> Self {
        ClusterConfiguration {
            d,
            p,
            clusters: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn verticality(&self) -> usize {
        self.p
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Total number of particles `|K|`.
    pub fn particle_count(&self) -> usize {
        self.clusters.iter().map(|c| c.points.len()).sum()
    }

    pub fn canonical(&self) -> Self {
        let mut clusters: Vec<Cluster> = self
            .clusters
            .iter()
            .map(|c| {
                let mut points = c.points.clone();
                points.sort();
                Cluster::new(points, c.label)
            })
            .collect();
        clusters.sort();
        ClusterConfiguration {
            d: self.d,
            p: self.p,
            clusters,
        }
    }

    /// The partition recording the interleaving of the clusters on the line.
    ///
    /// Particles are ranked by coordinate; each cluster becomes the block of
    /// ranks of its particles.
    pub fn chi(&self) -> Result<Partition> {
        if self.d != 1 {
            return Err(Error::InvalidConfiguration(format!(
                "chi needs d = 1, got d = {}",
                self.d
            )));
        }
        if self.clusters.iter().any(|c| c.label.is_basepoint()) {
            return Err(Error::InvalidConfiguration(
                "chi needs non-basepoint labels".into(),
            ));
        }
        let mut particles: Vec<(&BigRational, usize)> = self
            .clusters
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.points.iter().map(move |pt| (&pt[0], i)))
            .collect();
        particles.sort();
        let mut blocks = vec![Vec::new(); self.clusters.len()];
        for (rank, (_, i)) in particles.iter().enumerate() {
            blocks[*i].push(rank + 1);
        }
        Partition::canonicalize(&blocks)
    }

    /// Position (1-based) of cluster `i` among the blocks of [`chi`](Self::chi).
    pub fn block_index(&self, i: usize) -> Result<usize> {
        let c = self.clusters.get(i).ok_or(Error::BlockIndexOutOfRange {
            index: i,
            weight: self.clusters.len(),
        })?;
        let m = c.min_first();
        Ok(1 + self.clusters.iter().filter(|o| o.min_first() < m).count())
    }

    /// Deletes the cluster at position `i` of the stored order.
    pub fn remove_cluster(&self, i: usize) -> Result<Self> {
        if i >= self.clusters.len() {
            return Err(Error::BlockIndexOutOfRange {
                index: i,
                weight: self.clusters.len(),
            });
        }
        let mut clusters = self.clusters.clone();
        clusters.remove(i);
        Ok(ClusterConfiguration {
            d: self.d,
            p: self.p,
            clusters,
        })
    }

    /// First coordinates of all particles.
    pub fn support(&self) -> BTreeSet<BigRational> {
        self.clusters
            .iter()
            .flat_map(|c| c.points.iter().map(|pt| pt[0].clone()))
            .collect()
    }

    /// The clusters whose first coordinates lie in `interval`.
    ///
    /// Fails if an endpoint meets the support, or if a cluster has particles
    /// on both sides (only possible without verticality).
    pub fn restrict(&self, interval: &Interval) -> Result<Self> {
        let support = self.support();
        if let Some(x) = interval.endpoints().find(|x| support.contains(*x)) {
            return Err(Error::BoundaryCollision(x.to_string()));
        }
        let mut clusters = Vec::new();
        for (i, c) in self.clusters.iter().enumerate() {
            let inside = c.points.iter().filter(|pt| interval.contains(&pt[0])).count();
            if inside == c.points.len() {
                clusters.push(c.clone());
            } else if inside > 0 {
                return Err(Error::InvalidConfiguration(format!(
                    "cluster {i} straddles the interval boundary"
                )));
            }
        }
        Ok(ClusterConfiguration {
            d: self.d,
            p: self.p,
            clusters,
        })
    }

    /// Whether forgetting the first coordinate is injective on particles.
    pub fn is_projectable(&self) -> Result<bool> {
        if self.d < 2 {
            return Err(Error::InvalidConfiguration(
                "projectability needs d >= 2".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        Ok(self
            .clusters
            .iter()
            .flat_map(|c| &c.points)
            .all(|pt| seen.insert(&pt[1..])))
    }

    /// The union if all particles are distinct, `None` otherwise.
    pub fn partial_sum(&self, other: &Self) -> Result<Option<Self>> {
        if self.d != other.d || self.p != other.p {
            return Err(Error::InvalidConfiguration(
                "summands must share d and p".into(),
            ));
        }
        let mine: BTreeSet<&Point> = self.clusters.iter().flat_map(|c| &c.points).collect();
        if other.clusters.iter().flat_map(|c| &c.points).any(|pt| mine.contains(pt)) {
            return Ok(None);
        }
        let mut clusters = self.clusters.clone();
        clusters.extend(other.clusters.iter().cloned());
        Ok(Some(ClusterConfiguration {
            d: self.d,
            p: self.p,
            clusters,
        }))
    }

    /// Applies `f` to the first coordinate of every particle.
    pub fn map_first_coordinate(&self, f: impl Fn(&BigRational) -> BigRational) -> Result<Self> {
        let clusters = self
            .clusters
            .iter()
            .map(|c| {
                let points = c
                    .points
                    .iter()
                    .map(|pt| {
                        let mut q = pt.clone();
                        q[0] = f(&pt[0]);
                        q
                    })
                    .collect();
                Cluster::new(points, c.label)
            })
            .collect();
        ClusterConfiguration::new(self.d, self.p, clusters)
    }
}

impl PartialEq for ClusterConfiguration {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        a.d == b.d && a.p == b.p && a.clusters == b.clusters
    }
}

impl Eq for ClusterConfiguration {}

/// A configuration together with a width `t`, its support inside `(0, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreElement {
    t: BigRational,
    c: ClusterConfiguration,
}

impl MooreElement {
    pub fn new(t: BigRational, c: ClusterConfiguration) -> Result<Self> {
        if t < BigRational::zero() {
            return Err(Error::InvalidConfiguration("negative width".into()));
        }
        let zero = BigRational::zero();
        if c.support().iter().any(|x| *x <= zero || *x >= t) {
            return Err(Error::InvalidConfiguration(format!(
                "support is not inside (0, {t})"
            )));
        }
        Ok(MooreElement { t, c })
    }

    pub fn width(&self) -> &BigRational {
        &self.t
    }

    pub fn configuration(&self) -> &ClusterConfiguration {
        &self.c
    }

    /// `(t, c) · (t', c') = (t + t', c + T_t c')`.
    pub fn concat(&self, other: &MooreElement) -> Result<MooreElement> {
        let shifted = other.c.map_first_coordinate(|x| x + &self.t)?;
        let c = self
            .c
            .partial_sum(&shifted)?
            .expect("supports in disjoint intervals never collide");
        Ok(MooreElement {
            t: &self.t + &other.t,
            c,
        })
    }
}

/// A random configuration on the line with `clusters` clusters of sizes in
/// `1..=max_cluster`, coordinates distinct multiples of `1/1000` in `(0, 1)`,
/// and labels in `1..=max_label`.
pub fn random_line_configuration<R: Rng + ?Sized>(
    rng: &mut R,
    clusters: usize,
    max_cluster: usize,
    max_label: u32,
) -> ClusterConfiguration {
    let sizes: Vec<usize> = (0..clusters).map(|_| rng.gen_range(1..=max_cluster)).collect();
    let total: usize = sizes.iter().sum();
    let coords = sample(rng, 999, total).into_vec();
    let mut it = coords.into_iter();
    let cl = sizes
        .iter()
        .map(|&k| {
            let points = (0..k)
                .map(|_| {
                    let num = it.next().expect("enough coordinates") as i64 + 1;
                    vec![BigRational::new(num.into(), 1000.into())]
                })
                .collect();
            Cluster::new(points, Label(rng.gen_range(1..=max_label)))
        })
        .collect();
    ClusterConfiguration::new(1, 0, cl).expect("sampled coordinates are distinct")
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let b: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if b.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(a, b))
        }
        None => s
            .parse::<BigInt>()
            .map(BigRational::from_integer)
            .map_err(|_| Error::Parse(format!("bad rational {s:?}"))),
    }
}

pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

fn format_point(pt: &[BigRational]) -> String {
    let parts: Vec<String> = pt.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

impl fmt::Display for ClusterConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clusters
            .iter()
            .map(|c| {
                let pts: Vec<String> = c.points.iter().map(|p| format_point(p)).collect();
                format!("{{{}}}@{}", pts.join(" "), c.label.0)
            })
            .collect();
        write!(f, "R^{} p={}: {}", self.d, self.p, parts.join(" "))
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    d: usize,
    #[serde(default)]
    p: usize,
    clusters: Vec<ClusterJson>,
}

#[derive(Serialize, Deserialize)]
struct ClusterJson {
    points: Vec<Vec<RationalJson>>,
    label: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RationalJson {
    Int(i64),
    Text(String),
}

impl Serialize for ClusterConfiguration {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigJson {
            d: self.d,
            p: self.p,
            clusters: self
                .clusters
                .iter()
                .map(|c| ClusterJson {
                    points: c
                        .points
                        .iter()
                        .map(|pt| pt.iter().map(|x| RationalJson::Text(format_rational(x))).collect())
                        .collect(),
                    label: c.label.0,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClusterConfiguration {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ConfigJson::deserialize(deserializer)?;
        let mut clusters = Vec::with_capacity(raw.clusters.len());
        for c in raw.clusters {
            let mut points = Vec::with_capacity(c.points.len());
            for pt in c.points {
                let coords = pt
                    .into_iter()
                    .map(|x| match x {
                        RationalJson::Int(v) => Ok(BigRational::from_integer(v.into())),
                        RationalJson::Text(s) => parse_rational(&s),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                points.push(coords);
            }
            clusters.push(Cluster::new(points, Label(c.label)));
        }
        ClusterConfiguration::new(raw.d, raw.p, clusters).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn line(clusters: &[&[&str]]) -> ClusterConfiguration {
        let cl = clusters
            .iter()
            .map(|c| Cluster::new(c.iter().map(|x| vec![q(x)]).collect(), Label(1)))
            .collect();
        ClusterConfiguration::new(1, 0, cl).unwrap()
    }

    fn plane(p: usize, clusters: &[&[(&str, &str)]]) -> Result<ClusterConfiguration> {
        let cl = clusters
            .iter()
            .map(|c| Cluster::new(c.iter().map(|(x, y)| vec![q(x), q(y)]).collect(), Label(1)))
            .collect();
        ClusterConfiguration::new(2, p, cl)
    }

    fn sample_configuration() -> ClusterConfiguration {
        line(&[
            &["1/5", "3/5", "4/5"],
            &["1/4", "2/5"],
            &["7/20", "9/10"],
            &["7/10"],
            &["47/50", "1"],
        ])
    }

    #[test]
    fn chi_of_sample() {
        let c = sample_configuration();
        assert_eq!(c.chi().unwrap().to_string(), "1,5,7|2,4|3,8|6|9,10");
        assert_eq!(ClusterConfiguration::empty(1, 0).chi().unwrap(), Partition::empty());
        let c = line(&[&["3", "4"], &["1", "2"]]);
        assert_eq!(c.chi().unwrap().to_string(), "1,2|3,4");
    }

    #[test]
    fn face_map_on_sample() {
        let c = sample_configuration();
        let removed = c.remove_cluster(0).unwrap().chi().unwrap();
        let index = c.block_index(0).unwrap();
        assert_eq!(index, 1);
        assert_eq!(removed, c.chi().unwrap().remove_block(index).unwrap());
        assert_eq!(removed.to_string(), "1,3|2,5|4|6,7");
    }

    #[test]
    fn validation() {
        assert!(plane(1, &[&[("1/2", "0"), ("1/2", "1")]]).is_ok());
        assert!(plane(1, &[&[("1/2", "0"), ("1/3", "1")]]).is_err());
        assert!(plane(0, &[&[("1/2", "0")], &[("1/2", "0")]]).is_err());
        assert!(ClusterConfiguration::new(1, 0, vec![Cluster::new(vec![], Label(1))]).is_err());
        assert!(ClusterConfiguration::new(1, 2, vec![]).is_err());
    }

    #[test]
    fn support_and_restriction() {
        let c = plane(1, &[&[("1/4", "0"), ("1/4", "1")], &[("3/4", "0")]]).unwrap();
        assert_eq!(c.support(), [q("1/4"), q("3/4")].into_iter().collect());
        let left = c.restrict(&Interval::closed(q("0"), q("1/2"))).unwrap();
        assert_eq!(left.clusters().len(), 1);
        assert_eq!(left.support(), [q("1/4")].into_iter().collect());
        assert_eq!(c.restrict(&Interval::closed(q("0"), q("1"))).unwrap(), c);
        assert!(c.restrict(&Interval::closed(q("2"), q("3"))).unwrap().is_empty());
        assert!(matches!(
            c.restrict(&Interval::closed(q("1/4"), q("1"))),
            Err(Error::BoundaryCollision(_))
        ));
        let single = plane(1, &[&[("1/2", "0"), ("1/2", "1"), ("1/2", "2")]]).unwrap();
        assert_eq!(single.support().len(), 1);
    }

    #[test]
    fn restriction_pieces_recover() {
        let c = line(&[&["1/10", "2/10"], &["7/10"], &["3/10", "9/10"]]);
        let (a, b) = (q("1/4"), q("1/2"));
        assert!(c.restrict(&Interval::closed(a.clone(), b.clone())).is_err());
        let c = line(&[&["1/10", "2/10"], &["7/10"], &["3/10", "4/10"]]);
        let mid = c.restrict(&Interval::closed(a.clone(), b.clone())).unwrap();
        let lo = c.restrict(&Interval { lo: None, hi: Some(a) }).unwrap();
        let hi = c.restrict(&Interval { lo: Some(b), hi: None }).unwrap();
        let whole = mid.partial_sum(&lo).unwrap().unwrap().partial_sum(&hi).unwrap().unwrap();
        assert_eq!(whole, c);
    }

    #[test]
    fn projectability() {
        let fig = plane(
            1,
            &[
                &[("7/10", "7/10"), ("7/10", "9/10")],
                &[("1/2", "17/20"), ("1/2", "7/20")],
                &[("3/10", "4/5"), ("3/10", "2/5")],
                &[("3/10", "3/5"), ("3/10", "1/5")],
                &[("3/10", "3/10")],
            ],
        )
        .unwrap();
        assert!(fig.is_projectable().unwrap());
        let bad = plane(0, &[&[("0", "1")], &[("1", "1")]]).unwrap();
        assert!(!bad.is_projectable().unwrap());
        assert!(line(&[&["1"]]).is_projectable().is_err());
    }

    #[test]
    fn partial_sums() {
        let c = line(&[&["1", "2"]]);
        let e = ClusterConfiguration::empty(1, 0);
        assert_eq!(c.partial_sum(&e).unwrap().unwrap(), c);
        assert!(c.partial_sum(&line(&[&["2"]])).unwrap().is_none());
        let o = line(&[&["3"]]);
        assert_eq!(c.partial_sum(&o).unwrap(), o.partial_sum(&c).unwrap());
    }

    #[test]
    fn moore_concatenation() {
        let e = MooreElement::new(q("1"), ClusterConfiguration::empty(1, 0)).unwrap();
        let ee = e.concat(&e).unwrap();
        assert_eq!(ee.width(), &q("2"));
        assert!(ee.configuration().is_empty());
        let a = MooreElement::new(q("1/3"), line(&[&["1/6"]])).unwrap();
        let b = MooreElement::new(q("2/3"), line(&[&["1/3", "1/2"]])).unwrap();
        assert_eq!(a.concat(&b).unwrap().width(), &q("1"));
        assert!(MooreElement::new(q("1/6"), line(&[&["1/6"]])).is_err());
    }

    #[test]
    fn chi_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random_line_configuration(&mut rng, 3, 3, 2);
            let b = random_line_configuration(&mut rng, 2, 3, 2);
            let ma = MooreElement::new(q("1"), a.clone()).unwrap();
            let mb = MooreElement::new(q("1"), b.clone()).unwrap();
            let ab = ma.concat(&mb).unwrap();
            assert_eq!(ab.configuration().chi().unwrap(), a.chi().unwrap().stack(&b.chi().unwrap()));
        }
    }

    #[test]
    fn chi_ignores_monotone_reparametrization() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let c = random_line_configuration(&mut rng, 4, 3, 1);
            let cubed = c.map_first_coordinate(|x| x * x * x + x).unwrap();
            assert_eq!(c.chi().unwrap(), cubed.chi().unwrap());
            assert_eq!(
                c.chi().unwrap().filtration_level(),
                cubed.chi().unwrap().filtration_level()
            );
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = sample_configuration();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["clusters"][0]["points"][0][0], "1/5");
        let back: ClusterConfiguration = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
        let parsed: ClusterConfiguration = serde_json::from_str(
            r#"{"d":2,"p":1,"clusters":[{"points":[["1/2",0],["1/2",1]],"label":2}]}"#,
        )
        .unwrap();
        assert_eq!(parsed.particle_count(), 2);
    }
}
