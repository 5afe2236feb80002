//! Remnant subwords of an image tuple: the part of each image that survives
//! free reduction in every allowed triple product `h_j^α · h_i · h_k^β`
//! (neighbours range over the other images and their inverses; an image may
//! neighbour itself only with exponent +1).
//!
//! Two implementations are provided. The fast one takes per-junction maximal
//! cancellations and declares the interval between the worst prefix and the
//! worst suffix to be the remnant. The brute-force one replays every allowed
//! triple product with position-tagged reduction and intersects the
//! survivors; it exists as an independent oracle and the test suite holds the
//! two equal on exhaustive and randomized inputs.

use serde::Serialize;

use crate::error::Error;
use crate::hom::{FreeHomomorphism, TwistedPair};
use crate::words::{Letter, Word};

/// Cancellation data and surviving subword for a single image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorRemnant {
    /// Longest prefix of the image cancelled by any allowed left neighbour.
    pub left_cancel: usize,
    /// Longest suffix cancelled by any allowed right neighbour.
    pub right_cancel: usize,
    /// Subword surviving every allowed triple product (empty when none does).
    pub remnant: Word,
    pub survives: bool,
}

/// Remnant analysis of a whole image tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemnantReport {
    pub generators: Vec<GeneratorRemnant>,
    /// True iff every image keeps a nontrivial remnant.
    pub has_remnant: bool,
    /// `min_i |remnant_i|` when the tuple has remnant.
    pub remnant_length: Option<usize>,
}

impl RemnantReport {
    fn from_generators(generators: Vec<GeneratorRemnant>) -> RemnantReport {
        let has_remnant = generators.iter().all(|g| g.survives);
        let remnant_length = if has_remnant {
            generators.iter().map(|g| g.remnant.len()).min()
        } else {
            None
        };
        RemnantReport {
            generators,
            has_remnant,
            remnant_length,
        }
    }
}

fn validate_tuple(tuple: &[Word]) -> Result<(), Error> {
    let first = tuple.first().ok_or(Error::EmptyTuple)?;
    for w in tuple {
        if w.rank() != first.rank() {
            return Err(Error::RankMismatch {
                expected: first.rank().get(),
                found: w.rank().get(),
            });
        }
    }
    Ok(())
}

/// All words allowed to sit next to `tuple[i]` in a triple product: the other
/// images with both exponents, the image itself with exponent +1, and the
/// implicit empty neighbour (omitted here because it cancels nothing).
fn allowed_neighbours(tuple: &[Word], i: usize) -> Vec<Word> {
    let mut neighbours = Vec::with_capacity(2 * tuple.len() - 1);
    for (j, w) in tuple.iter().enumerate() {
        if j == i {
            neighbours.push(w.clone());
        } else {
            neighbours.push(w.clone());
            neighbours.push(w.inverse());
        }
    }
    neighbours
}

/// Maximal left/right cancellations into each image over all allowed single
/// junctions. The cancellation is measured in letters removed from the image
/// itself; a fully consumed neighbour therefore contributes at most its own
/// length.
pub fn max_cancellations(tuple: &[Word]) -> Result<Vec<(usize, usize)>, Error> {
    validate_tuple(tuple)?;
    let mut result = Vec::with_capacity(tuple.len());
    for (i, h) in tuple.iter().enumerate() {
        let mut left = 0;
        let mut right = 0;
        for f in allowed_neighbours(tuple, i) {
            left = left.max(f.cancellation_len(h)?);
            right = right.max(h.cancellation_len(&f)?);
        }
        result.push((left, right));
    }
    Ok(result)
}

/// Fast remnant computation from pairwise junction maxima: the image survives
/// iff the worst prefix and worst suffix leave at least one letter, and the
/// remnant is exactly the interval between them.
pub fn remnant_report(tuple: &[Word]) -> Result<RemnantReport, Error> {
    let cancellations = max_cancellations(tuple)?;
    let generators = tuple
        .iter()
        .zip(cancellations)
        .map(|(h, (left, right))| {
            let survives = left + right < h.len();
            let remnant = if survives {
                h.subword(left, h.len() - right)
            } else {
                Word::identity(h.rank())
            };
            GeneratorRemnant {
                left_cancel: left,
                right_cancel: right,
                remnant,
                survives,
            }
        })
        .collect();
    Ok(RemnantReport::from_generators(generators))
}

/// Letter tagged with its position inside the middle factor, if it came from
/// there.
#[derive(Clone, Copy)]
struct Tagged {
    letter: Letter,
    origin: Option<usize>,
}

/// Stack reduction of `f · h · g` tracking which positions of `h` survive.
fn surviving_positions(f: &Word, h: &Word, g: &Word) -> Vec<bool> {
    let mut stack: Vec<Tagged> = Vec::with_capacity(f.len() + h.len() + g.len());
    let stream = f
        .letters()
        .iter()
        .map(|&letter| Tagged {
            letter,
            origin: None,
        })
        .chain(h.letters().iter().enumerate().map(|(pos, &letter)| Tagged {
            letter,
            origin: Some(pos),
        }))
        .chain(g.letters().iter().map(|&letter| Tagged {
            letter,
            origin: None,
        }));
    for tagged in stream {
        match stack.last() {
            Some(top) if top.letter.inverse() == tagged.letter => {
                stack.pop();
            }
            _ => stack.push(tagged),
        }
    }
    let mut survives = vec![false; h.len()];
    for tagged in stack {
        if let Some(pos) = tagged.origin {
            survives[pos] = true;
        }
    }
    survives
}

/// Brute-force remnant oracle: enumerates every allowed triple product,
/// replays it with position-tagged reduction, and intersects the surviving
/// positions; the remnant is the longest contiguous surviving block (first
/// block on ties). Left/right cancellations are likewise measured directly
/// on single junctions. Independent of [`remnant_report`].
pub fn remnant_report_bruteforce(tuple: &[Word]) -> Result<RemnantReport, Error> {
    validate_tuple(tuple)?;
    let rank = tuple[0].rank();
    let empty = Word::identity(rank);
    let mut generators = Vec::with_capacity(tuple.len());
    for (i, h) in tuple.iter().enumerate() {
        let mut neighbours = allowed_neighbours(tuple, i);
        neighbours.push(empty.clone());

        let mut left = 0;
        let mut right = 0;
        for f in &neighbours {
            let eaten = h.len()
                - surviving_positions(f, h, &empty)
                    .iter()
                    .filter(|&&s| s)
                    .count();
            left = left.max(eaten);
            let eaten = h.len()
                - surviving_positions(&empty, h, f)
                    .iter()
                    .filter(|&&s| s)
                    .count();
            right = right.max(eaten);
        }

        let mut survives_all = vec![true; h.len()];
        for f in &neighbours {
            for g in &neighbours {
                let survived = surviving_positions(f, h, g);
                for (flag, s) in survives_all.iter_mut().zip(survived) {
                    *flag &= s;
                }
            }
        }
        let (start, end) = longest_true_run(&survives_all);
        generators.push(GeneratorRemnant {
            left_cancel: left,
            right_cancel: right,
            remnant: h.subword(start, end),
            survives: end > start,
        });
    }
    Ok(RemnantReport::from_generators(generators))
}

fn longest_true_run(flags: &[bool]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut run_start = None;
    for (i, &flag) in flags.iter().enumerate() {
        match (flag, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(start)) => {
                if i - start > best.1 - best.0 {
                    best = (start, i);
                }
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        if flags.len() - start > best.1 - best.0 {
            best = (start, flags.len());
        }
    }
    best
}

/// Remnant length of a homomorphism: `min_i |Rem_φ a_i|`, absent when some
/// image keeps no remnant.
pub fn remnant_length(phi: &FreeHomomorphism) -> Option<usize> {
    remnant_report(phi.images())
        .ok()
        .and_then(|report| report.remnant_length)
}

/// The gap `l = min_i(|Rem_φ a_i| − |ψ(a_i)|)` of a twisted pair; present
/// only when φ has remnant. Bounded-solution-length arguments require
/// `l ≥ 1`, which callers must check.
pub fn min_gap(pair: &TwistedPair) -> Option<i64> {
    let report = remnant_report(pair.phi().images()).ok()?;
    if !report.has_remnant {
        return None;
    }
    report
        .generators
        .iter()
        .zip(pair.psi().images())
        .map(|(gen, psi_image)| gen.remnant.len() as i64 - psi_image.len() as i64)
        .min()
}
