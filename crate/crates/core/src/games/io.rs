//! Line-oriented text serialization of compact games.
//!
//! Formats (whitespace separated, reals at 17 significant digits so f64
//! round-trips exactly):
//!
//! ```text
//! wvg n q        graph n m      mcn n k
//! w_0            i j w          P-mask N-mask w
//! ...            ...            ...
//! ```
//!
//! Masks are hex encodings of the membership bitmask.

use std::io::{BufRead, Write};

use crate::coalition::Coalition;
use crate::error::{Error, Result};

use super::{Edge, MarginalContributionNetwork, Rule, WeightedGraph, WeightedVotingGame};

/// A parsed game file.
pub enum GameFile {
    Wvg(WeightedVotingGame),
    Graph(WeightedGraph),
    Mcn(MarginalContributionNetwork),
}

/// Formats a real at 17 significant digits (exact f64 round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_wvg(w: &mut impl Write, game: &WeightedVotingGame) -> std::io::Result<()> {
    writeln!(w, "wvg {} {}", game.weights().len(), fmt_f64(game.quota()))?;
    for &weight in game.weights() {
        writeln!(w, "{}", fmt_f64(weight))?;
    }
    Ok(())
}

pub fn write_graph(w: &mut impl Write, graph: &WeightedGraph) -> std::io::Result<()> {
    writeln!(w, "graph {} {}", graph.vertex_count(), graph.edges().len())?;
    for e in graph.edges() {
        writeln!(w, "{} {} {}", e.u, e.v, fmt_f64(e.weight))?;
    }
    Ok(())
}

pub fn write_mcn(w: &mut impl Write, mcn: &MarginalContributionNetwork) -> std::io::Result<()> {
    writeln!(w, "mcn {} {}", mcn.player_count(), mcn.rules().len())?;
    for r in mcn.rules() {
        writeln!(
            w,
            "{} {} {}",
            r.positive.to_hex(),
            r.negative.to_hex(),
            fmt_f64(r.weight)
        )?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {tok:?}")))
}

/// Reads any of the three game formats, dispatching on the header tag.
pub fn read_game(r: &mut impl BufRead) -> Result<GameFile> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))
        .and_then(|(i, l)| Ok((i, l?)))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 {
        return Err(parse_err(1, "header must be `<kind> <n> <count>`"));
    }
    let n: usize = parse(head[1], 1, "player count")?;
    match head[0] {
        "wvg" => {
            let quota: f64 = parse(head[2], 1, "quota")?;
            let mut weights = Vec::with_capacity(n);
            for _ in 0..n {
                let (i, line) = lines
                    .next()
                    .ok_or_else(|| parse_err(n + 1, "missing weight line"))?;
                let line = line?;
                weights.push(parse(line.trim(), i + 1, "weight")?);
            }
            Ok(GameFile::Wvg(WeightedVotingGame::new(weights, quota)))
        }
        "graph" => {
            let m: usize = parse(head[2], 1, "edge count")?;
            let mut edges = Vec::with_capacity(m);
            for _ in 0..m {
                let (i, line) = lines
                    .next()
                    .ok_or_else(|| parse_err(m + 1, "missing edge line"))?;
                let line = line?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(i + 1, "edge line must be `i j w`"));
                }
                edges.push(Edge {
                    u: parse(toks[0], i + 1, "endpoint")?,
                    v: parse(toks[1], i + 1, "endpoint")?,
                    weight: parse(toks[2], i + 1, "weight")?,
                });
            }
            Ok(GameFile::Graph(WeightedGraph::new(n, edges)))
        }
        "mcn" => {
            let k: usize = parse(head[2], 1, "rule count")?;
            let mut rules = Vec::with_capacity(k);
            for _ in 0..k {
                let (i, line) = lines
                    .next()
                    .ok_or_else(|| parse_err(k + 1, "missing rule line"))?;
                let line = line?;
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(parse_err(i + 1, "rule line must be `P-mask N-mask w`"));
                }
                let positive = Coalition::from_hex(n, toks[0])
                    .ok_or_else(|| parse_err(i + 1, "bad P mask"))?;
                let negative = Coalition::from_hex(n, toks[1])
                    .ok_or_else(|| parse_err(i + 1, "bad N mask"))?;
                rules.push(Rule {
                    positive,
                    negative,
                    weight: parse(toks[2], i + 1, "weight")?,
                });
            }
            Ok(GameFile::Mcn(MarginalContributionNetwork::new(n, rules)))
        }
        other => Err(parse_err(1, format!("unknown game kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Game;
    use crate::games::WeightDistribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wvg_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = WeightedVotingGame::generate(
            7,
            WeightDistribution::Gaussian { mu: 1.0, sigma: 0.3 },
            0.55,
            &mut rng,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_wvg(&mut buf, &g).unwrap();
        let back = match read_game(&mut buf.as_slice()).unwrap() {
            GameFile::Wvg(w) => w,
            _ => panic!("wrong kind"),
        };
        assert_eq!(back.weights(), g.weights());
        assert_eq!(back.quota(), g.quota());
    }

    #[test]
    fn graph_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let edges = super::super::generate_graph(
            super::super::GraphModel::ErdosRenyi { p: 0.4 },
            12,
            &mut rng,
        )
        .unwrap();
        let g = super::super::assign_edge_weights(&edges, 12, 1.0, 0.6, &mut rng);
        let mut buf = Vec::new();
        write_graph(&mut buf, &g).unwrap();
        let back = match read_game(&mut buf.as_slice()).unwrap() {
            GameFile::Graph(g) => g,
            _ => panic!("wrong kind"),
        };
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn mcn_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mcn = MarginalContributionNetwork::generate(
            70,
            5,
            0.2,
            0.2,
            WeightDistribution::Exponential { lambda: 1.5 },
            &mut rng,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_mcn(&mut buf, &mcn).unwrap();
        let back = match read_game(&mut buf.as_slice()).unwrap() {
            GameFile::Mcn(m) => m,
            _ => panic!("wrong kind"),
        };
        assert_eq!(back.rules().len(), mcn.rules().len());
        for (a, b) in back.rules().iter().zip(mcn.rules()) {
            assert_eq!(a.positive, b.positive);
            assert_eq!(a.negative, b.negative);
            assert_eq!(a.weight, b.weight);
        }
        // values agree as well
        let c = crate::coalition::Coalition::from_members(70, &[0, 3, 69]);
        assert_eq!(back.value(&c), mcn.value(&c));
    }

    #[test]
    fn bad_header_is_a_parse_error() {
        let mut input = "wug 3 1.0\n".as_bytes();
        assert!(matches!(read_game(&mut input), Err(Error::Parse { .. })));
    }
}
