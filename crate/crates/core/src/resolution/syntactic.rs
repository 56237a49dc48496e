//! Syntactic factors `P(p|c)`, `P(d)` and `P(r)` as smoothed relative
//! frequencies over gold antecedents.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use crate::corpus::CaseMarker;
use crate::detection::ZeroPronoun;
use crate::error::{Error, Result};

use super::candidates::AntecedentCandidate;
use super::model_file::{self, Record};

/// Bucket for bare nouns and particles never seen in training.
pub const UNK_PARTICLE: &str = "<unk>";

/// Lower edges of distance bins; the last bin is open-ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceBins(Vec<usize>);

impl Default for DistanceBins {
    /// `0, 1, 2, 3, 4, 5+`
    fn default() -> Self {
        DistanceBins(vec![0, 1, 2, 3, 4, 5])
    }
}

impl DistanceBins {
    pub fn new(edges: Vec<usize>) -> Result<Self> {
        if edges.first() != Some(&0) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "distance bin edges must start at 0 and increase strictly, got {edges:?}"
            )));
        }
        Ok(DistanceBins(edges))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn bin(&self, distance: usize) -> usize {
        self.0.partition_point(|&e| e <= distance) - 1
    }

    pub fn label(&self, bin: usize) -> String {
        let lo = self.0[bin];
        match self.0.get(bin + 1) {
            None => format!("{lo}+"),
            Some(&hi) if hi == lo + 1 => lo.to_string(),
            Some(&hi) => format!("{lo}-{}", hi - 1),
        }
    }
}

fn particle_key(p: Option<&str>) -> &str {
    p.unwrap_or(UNK_PARTICLE)
}

/// Trained syntactic model. Probabilities are derived from the stored counts
/// on query.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntacticModel {
    lambda: f64,
    bins: DistanceBins,
    particle_case: BTreeMap<(CaseMarker, String), u64>,
    distance: Vec<u64>,
    relative: [u64; 2],
    particles: BTreeSet<String>,
}

impl SyntacticModel {
    /// Counts features of the gold antecedents.
    pub fn train<'a>(
        pairs: impl IntoIterator<Item = &'a (ZeroPronoun, AntecedentCandidate)>,
        lambda: f64,
        bins: DistanceBins,
    ) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::config("lambda_syn must be >= 0"));
        }
        let mut model = SyntacticModel {
            lambda,
            distance: vec![0; bins.len()],
            bins,
            particle_case: BTreeMap::new(),
            relative: [0; 2],
            particles: BTreeSet::from([UNK_PARTICLE.to_string()]),
        };
        for (zp, cand) in pairs {
            let p = particle_key(cand.particle.as_deref()).to_string();
            model.particles.insert(p.clone());
            *model.particle_case.entry((zp.case, p)).or_default() += 1;
            model.distance[model.bins.bin(cand.distance)] += 1;
            model.relative[cand.in_relative_clause as usize] += 1;
        }
        if model.pair_count() == 0 {
            return Err(Error::EmptyTraining("syntactic model needs at least one pair"));
        }
        Ok(model)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bins(&self) -> &DistanceBins {
        &self.bins
    }

    /// Particle support including the unknown bucket.
    pub fn particles(&self) -> &BTreeSet<String> {
        &self.particles
    }

    pub fn pair_count(&self) -> u64 {
        self.relative.iter().sum()
    }

    pub fn particle_count(&self, particle: &str, case: CaseMarker) -> u64 {
        self.particle_case
            .get(&(case, particle.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn distance_count(&self, bin: usize) -> u64 {
        self.distance.get(bin).copied().unwrap_or(0)
    }

    pub fn relative_count(&self, in_relative_clause: bool) -> u64 {
        self.relative[in_relative_clause as usize]
    }

    /// `P(p|c)`. Unseen particles and bare nouns use the unknown bucket; a
    /// case absent from training backs off to the particle marginal.
    pub fn p_particle(&self, particle: Option<&str>, case: CaseMarker) -> f64 {
        let key = particle_key(particle);
        let key = if self.particles.contains(key) {
            key
        } else {
            UNK_PARTICLE
        };
        let support = self.particles.len() as f64;
        let case_total: u64 = self
            .particle_case
            .iter()
            .filter(|((c, _), _)| *c == case)
            .map(|(_, f)| f)
            .sum();
        let (num, den) = if case_total > 0 {
            (self.particle_count(key, case), case_total)
        } else {
            let marginal = CaseMarker::ALL
                .iter()
                .map(|&c| self.particle_count(key, c))
                .sum();
            (marginal, self.pair_count())
        };
        (num as f64 + self.lambda) / (den as f64 + self.lambda * support)
    }

    /// `P(d)` over distance bins.
    pub fn p_distance(&self, distance: usize) -> f64 {
        let bins = self.bins.len() as f64;
        (self.distance[self.bins.bin(distance)] as f64 + self.lambda)
            / (self.pair_count() as f64 + self.lambda * bins)
    }

    /// `P(r)`.
    pub fn p_relative(&self, in_relative_clause: bool) -> f64 {
        (self.relative[in_relative_clause as usize] as f64 + self.lambda)
            / (self.pair_count() as f64 + self.lambda * 2.0)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let edges: Vec<String> = self.bins.edges().iter().map(usize::to_string).collect();
        writeln!(w, "bins\t{}", edges.join(","))?;
        for (bin, f) in self.distance.iter().enumerate() {
            writeln!(w, "d\t{}\t{f}", self.bins.edges()[bin])?;
        }
        writeln!(w, "lambda\t{}", self.lambda)?;
        for p in &self.particles {
            writeln!(w, "particle\t{p}")?;
        }
        for ((c, p), f) in &self.particle_case {
            writeln!(w, "pc\t{c}\t{p}\t{f}")?;
        }
        writeln!(w, "r\tfalse\t{}", self.relative[0])?;
        writeln!(w, "r\ttrue\t{}", self.relative[1])?;
        w.flush()?;
        Ok(())
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut lambda = None;
        let mut bins = None;
        let mut by_edge = BTreeMap::new();
        let mut particle_case = BTreeMap::new();
        let mut relative = [0; 2];
        let mut particles = BTreeSet::new();
        for Record { line, fields } in model_file::records(reader)? {
            let f: Vec<&str> = fields.iter().map(String::as_str).collect();
            match f.as_slice() {
                ["bins", edges] => {
                    let edges = edges
                        .split(',')
                        .map(|e| model_file::number(line, e))
                        .collect::<Result<Vec<usize>>>()?;
                    bins = Some(DistanceBins::new(edges)?);
                }
                ["lambda", l] => lambda = Some(model_file::number::<f64>(line, l)?),
                ["particle", p] => {
                    particles.insert(p.to_string());
                }
                ["pc", c, p, n] => {
                    let c = model_file::case(line, c)?;
                    particle_case.insert((c, p.to_string()), model_file::number(line, n)?);
                }
                ["d", edge, n] => {
                    by_edge.insert(model_file::number::<usize>(line, edge)?, model_file::number(line, n)?);
                }
                ["r", "false", n] => relative[0] = model_file::number(line, n)?,
                ["r", "true", n] => relative[1] = model_file::number(line, n)?,
                _ => return Err(model_file::unexpected(line)),
            }
        }
        let bins = bins.ok_or_else(|| Error::config("syntactic model lacks 'bins'"))?;
        let lambda = lambda.ok_or_else(|| Error::config("syntactic model lacks 'lambda'"))?;
        let distance = bins
            .edges()
            .iter()
            .map(|e| by_edge.get(e).copied().unwrap_or(0))
            .collect();
        particles.insert(UNK_PARTICLE.to_string());
        Ok(SyntacticModel {
            lambda,
            bins,
            particle_case,
            distance,
            relative,
            particles,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Location;

    fn pair(case: CaseMarker, particle: Option<&str>, distance: usize, rel: bool) -> (ZeroPronoun, AntecedentCandidate) {
        (
            ZeroPronoun {
                doc_id: "d".into(),
                sentence: distance,
                predicate_token: 5,
                verb: "yomu".into(),
                case,
                detection_prob: 1.0,
                exophoric: false,
            },
            AntecedentCandidate {
                location: Location::new(0, 0),
                lemma: "x".into(),
                particle: particle.map(str::to_string),
                distance,
                in_relative_clause: rel,
                classes: vec![],
            },
        )
    }

    #[test]
    fn bins_and_labels() {
        let b = DistanceBins::default();
        assert_eq!(b.bin(0), 0);
        assert_eq!(b.bin(4), 4);
        assert_eq!(b.bin(5), 5);
        assert_eq!(b.bin(40), 5);
        assert_eq!(b.label(5), "5+");
        let wide = DistanceBins::new(vec![0, 1, 3]).unwrap();
        assert_eq!(wide.bin(2), 1);
        assert_eq!(wide.label(1), "1-2");
        assert!(DistanceBins::new(vec![1, 2]).is_err());
        assert!(DistanceBins::new(vec![0, 2, 2]).is_err());
    }

    #[test]
    fn particle_ratios_without_smoothing() {
        use CaseMarker::Ga;
        let pairs = vec![
            pair(Ga, Some("ga"), 0, false),
            pair(Ga, Some("ga"), 0, false),
            pair(Ga, Some("wo"), 1, false),
        ];
        let m = SyntacticModel::train(&pairs, 0.0, DistanceBins::default()).unwrap();
        assert!((m.p_particle(Some("ga"), Ga) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.p_particle(Some("wo"), Ga) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.p_particle(None, Ga), 0.0);
        assert!((m.p_distance(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.p_distance(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.p_relative(false), 1.0);
        assert_eq!(m.p_relative(true), 0.0);
    }

    #[test]
    fn unseen_particle_maps_to_unknown_bucket() {
        use CaseMarker::*;
        let pairs = vec![pair(Ga, Some("ga"), 0, false), pair(Wo, None, 0, false)];
        let m = SyntacticModel::train(&pairs, 0.0, DistanceBins::default()).unwrap();
        assert_eq!(m.p_particle(Some("zzz"), Wo), 1.0);
        assert_eq!(m.p_particle(None, Wo), 1.0);
        // ni unseen: particle marginal over all pairs
        assert_eq!(m.p_particle(Some("ga"), Ni), 0.5);
    }

    #[test]
    fn smoothed_distributions_sum_to_one() {
        use CaseMarker::*;
        let pairs = vec![
            pair(Ga, Some("wa"), 0, true),
            pair(Ga, Some("ga"), 2, false),
            pair(Wo, Some("wo"), 7, false),
        ];
        let m = SyntacticModel::train(&pairs, 0.5, DistanceBins::default()).unwrap();
        for c in CaseMarker::ALL {
            let s: f64 = m.particles().iter().map(|p| m.p_particle(Some(p), c)).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        let s: f64 = m.bins().edges().iter().map(|&d| m.p_distance(d)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((m.p_relative(true) + m.p_relative(false) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_training_is_error() {
        assert!(SyntacticModel::train(&[] as &[(ZeroPronoun, AntecedentCandidate)], 0.0, DistanceBins::default()).is_err());
    }

    #[test]
    fn model_file_round_trip() {
        use CaseMarker::*;
        let pairs = vec![pair(Ga, Some("wa"), 0, true), pair(Ni, Some("ni"), 9, false)];
        let m = SyntacticModel::train(&pairs, 0.25, DistanceBins::default()).unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf).unwrap();
        let back = SyntacticModel::parse(&buf[..]).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        back.write(&mut again).unwrap();
        assert_eq!(buf, again);
    }
}
