//! Decision procedures for doubly-twisted conjugacy `u = φ(z)·v·ψ(z)⁻¹`:
//! a remnant-inequality certificate that two classes are distinct, a
//! bounded-solution-length enumeration that settles the relation outright
//! when a strict remnant inequality holds, the singly-twisted and subgroup
//! membership specializations, an injectivity certificate, and a bounded
//! brute-force witness search used as a test oracle.

use serde::Serialize;

use crate::error::Error;
use crate::hom::{FreeHomomorphism, TwistedPair};
use crate::remnant::{min_gap, remnant_report, RemnantReport};
use crate::words::{enumerate_ball, Rank, Word};

/// How a `Distinct` verdict was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertificateKind {
    /// Remnant of the extension `φ*u*v` exists and is at least as long as
    /// the corresponding ψ-image on every domain generator.
    WeakRemnantInequality,
}

/// A verified certificate that `[u] ≠ [v]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Remnant report of the extension `φ*u*v` whose inequalities were
    /// checked.
    pub report: RemnantReport,
}

/// Why no verdict could be reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UndecidedReason {
    /// Some generator has `|Rem_φ a| ≤ |ψ(a)|`, so no solution bound exists.
    StrictInequalityFails,
    /// φ has no remnant at all.
    NoRemnant,
    /// Neither the certificate nor the bounded enumeration applies.
    NoApplicableMethod,
}

/// Verdict of a conjugacy query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// `[u] ≠ [v]`, certified without enumeration.
    Distinct(Certificate),
    /// `u = φ(z)·v·ψ(z)⁻¹` for the carried witness `z` (length-lex first).
    Conjugate(Word),
    /// No `z` with `|z| ≤ bound` solves the relation, and the bound covers
    /// all solutions, so `[u] ≠ [v]`.
    NotConjugate(usize),
    Undecided(UndecidedReason),
}

impl Decision {
    pub fn is_decided(&self) -> bool {
        !matches!(self, Decision::Undecided(_))
    }
}

fn check_query_ranks(pair: &TwistedPair, u: &Word, v: &Word) -> Result<(), Error> {
    for w in [u, v] {
        if w.rank() != pair.codomain_rank() {
            return Err(Error::RankMismatch {
                expected: pair.codomain_rank().get(),
                found: w.rank().get(),
            });
        }
    }
    Ok(())
}

/// Attempts to certify `[u] ≠ [v]` from the remnant of `φ*u*v`: the
/// certificate is present when the extension has remnant on all `n+2`
/// generators and `|Rem a_i| ≥ |ψ(a_i)|` holds for the `n` domain
/// generators. Absence proves nothing.
pub fn certify_distinct(
    pair: &TwistedPair,
    u: &Word,
    v: &Word,
) -> Result<Option<Certificate>, Error> {
    check_query_ranks(pair, u, v)?;
    if u == v {
        // z = ε solves the relation, so the classes coincide; the remnant
        // condition also fails on the two extension generators.
        return Ok(None);
    }
    let extension = pair.phi().star_extension(u, v)?;
    let report = remnant_report(extension.images())?;
    if !report.has_remnant {
        return Ok(None);
    }
    let inequality_holds = report
        .generators
        .iter()
        .zip(pair.psi().images())
        .all(|(gen, psi_image)| gen.remnant.len() >= psi_image.len());
    if inequality_holds {
        Ok(Some(Certificate {
            kind: CertificateKind::WeakRemnantInequality,
            report,
        }))
    } else {
        Ok(None)
    }
}

/// The solution bound `⌊(|u| + |v|)/l⌋` with `l = min_i(|Rem_φ a_i| −
/// |ψ(a_i)|)`; present only under the strict inequality `l ≥ 1`. Every
/// solution `z` of the relation satisfies `|z| ≤ bound`, including the
/// boundary case where the quotient is an integer.
pub fn solution_bound(pair: &TwistedPair, u: &Word, v: &Word) -> Result<Option<usize>, Error> {
    check_query_ranks(pair, u, v)?;
    match min_gap(pair) {
        Some(gap) if gap >= 1 => Ok(Some((u.len() + v.len()) / gap as usize)),
        _ => Ok(None),
    }
}

/// Settles the relation by enumerating every `z` with `|z|` up to the
/// solution bound in length-lexicographic order. Returns the first witness
/// found, or `NotConjugate(bound)` after exhausting the ball; the verdict is
/// deterministic.
pub fn bsl_decide(pair: &TwistedPair, u: &Word, v: &Word) -> Result<Decision, Error> {
    let bound = match solution_bound(pair, u, v)? {
        Some(bound) => bound,
        None => return Ok(Decision::Undecided(UndecidedReason::StrictInequalityFails)),
    };
    for z in enumerate_ball(pair.domain_rank(), bound) {
        if pair.twisted_image(v, &z)? == *u {
            return Ok(Decision::Conjugate(z));
        }
    }
    Ok(Decision::NotConjugate(bound))
}

/// Full decision pipeline: trivial equality first, then the certificate,
/// then the bounded enumeration, and `Undecided` only when nothing applies.
pub fn decide(pair: &TwistedPair, u: &Word, v: &Word) -> Result<Decision, Error> {
    check_query_ranks(pair, u, v)?;
    if u == v {
        return Ok(Decision::Conjugate(Word::identity(pair.domain_rank())));
    }
    if let Some(certificate) = certify_distinct(pair, u, v)? {
        return Ok(Decision::Distinct(certificate));
    }
    match bsl_decide(pair, u, v)? {
        Decision::Undecided(_) => Ok(Decision::Undecided(UndecidedReason::NoApplicableMethod)),
        verdict => Ok(verdict),
    }
}

/// Singly-twisted specialization: `ψ = identity`, so the enumeration applies
/// exactly when every remnant has length at least 2.
pub fn singly_twisted_decide(
    phi: &FreeHomomorphism,
    u: &Word,
    v: &Word,
) -> Result<Decision, Error> {
    if phi.domain_rank() != phi.codomain_rank() {
        return Err(Error::RankMismatch {
            expected: phi.domain_rank().get(),
            found: phi.codomain_rank().get(),
        });
    }
    let identity = FreeHomomorphism::identity(phi.domain_rank());
    let pair = TwistedPair::new(phi.clone(), identity)?;
    decide(&pair, u, v)
}

/// Decides `w ∈ φ(G)` via `ψ = trivial`, `v = ε`: a `Conjugate(z)` verdict
/// means `w = φ(z)`. Requires φ to have remnant; the solution bound is
/// `⌊|w|/l⌋` with `l` the remnant length of φ.
pub fn membership(phi: &FreeHomomorphism, w: &Word) -> Result<Decision, Error> {
    if w.rank() != phi.codomain_rank() {
        return Err(Error::RankMismatch {
            expected: phi.codomain_rank().get(),
            found: w.rank().get(),
        });
    }
    if !remnant_report(phi.images())?.has_remnant {
        return Ok(Decision::Undecided(UndecidedReason::NoRemnant));
    }
    let trivial = FreeHomomorphism::trivial(phi.domain_rank(), phi.codomain_rank());
    let pair = TwistedPair::new(phi.clone(), trivial)?;
    decide(&pair, w, &Word::identity(phi.codomain_rank()))
}

/// True iff φ has remnant, which guarantees injectivity. False means
/// unknown, not non-injective.
pub fn certify_injective(phi: &FreeHomomorphism) -> bool {
    remnant_report(phi.images())
        .map(|report| report.has_remnant)
        .unwrap_or(false)
}

/// Exhaustive witness search over `|z| ≤ k`, with no remnant preconditions:
/// returns the length-lexicographically first witness, or `None`, which
/// proves nothing by itself. Test oracle; enumerates recursively and
/// independently of the ball iterator used by [`bsl_decide`].
pub fn oracle_decide(
    pair: &TwistedPair,
    u: &Word,
    v: &Word,
    k: usize,
) -> Result<Option<Word>, Error> {
    check_query_ranks(pair, u, v)?;

    fn search(
        pair: &TwistedPair,
        u: &Word,
        v: &Word,
        rank: Rank,
        prefix: &mut Vec<crate::words::Letter>,
        remaining: usize,
    ) -> Result<Option<Word>, Error> {
        if remaining == 0 {
            let z = Word::reduce(rank, prefix.iter().copied())?;
            debug_assert_eq!(z.len(), prefix.len());
            return Ok(if pair.twisted_image(v, &z)? == *u {
                Some(z)
            } else {
                None
            });
        }
        for idx in 0..rank.alphabet_size() {
            let letter = letter_at(idx);
            if let Some(last) = prefix.last() {
                if last.inverse() == letter {
                    continue;
                }
            }
            prefix.push(letter);
            let found = search(pair, u, v, rank, prefix, remaining - 1)?;
            prefix.pop();
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    fn letter_at(idx: usize) -> crate::words::Letter {
        crate::words::Letter::new(
            idx / 2,
            if idx % 2 == 0 {
                crate::words::Sign::Plus
            } else {
                crate::words::Sign::Minus
            },
        )
    }

    let rank = pair.domain_rank();
    let mut prefix = Vec::with_capacity(k);
    for length in 0..=k {
        if let Some(z) = search(pair, u, v, rank, &mut prefix, length)? {
            return Ok(Some(z));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rank(n: usize) -> Rank {
        Rank::new(n).unwrap()
    }

    fn word(text: &str, n: usize) -> Word {
        parse_word(text, rank(n)).unwrap()
    }

    fn example_pair() -> TwistedPair {
        let phi =
            FreeHomomorphism::from_images(vec![word("babaa", 2), word("aaBabbb", 2)]).unwrap();
        let psi = FreeHomomorphism::from_images(vec![word("B^2", 2), word("a", 2)]).unwrap();
        TwistedPair::new(phi, psi).unwrap()
    }

    #[test]
    fn certificate_fails_on_worked_example() {
        let pair = example_pair();
        let cert = certify_distinct(&pair, &word("bab", 2), &word("b^4a^2", 2)).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn certificate_present_on_positive_inputs() {
        let phi = FreeHomomorphism::from_images(vec![word("aab", 2), word("abb", 2)]).unwrap();
        let psi = FreeHomomorphism::identity(rank(2));
        let pair = TwistedPair::new(phi, psi).unwrap();
        let u = word("bba", 2);
        let v = word("baa", 2);
        let cert = certify_distinct(&pair, &u, &v).unwrap().expect("certificate");
        assert_eq!(cert.kind, CertificateKind::WeakRemnantInequality);
        assert!(cert.report.has_remnant);
        // Re-verify the same inequalities through the brute-force remnant
        // oracle before trusting the certificate.
        let extension = pair.phi().star_extension(&u, &v).unwrap();
        let brute = crate::remnant::remnant_report_bruteforce(extension.images()).unwrap();
        assert!(brute.has_remnant);
        for (gen, psi_image) in brute.generators.iter().zip(pair.psi().images()) {
            assert!(gen.remnant.len() >= psi_image.len());
        }
        // And the certificate must be sound against exhaustive search.
        assert_eq!(oracle_decide(&pair, &u, &v, 5).unwrap(), None);
    }

    #[test]
    fn certificate_absent_for_equal_words() {
        let pair = example_pair();
        let u = word("bab", 2);
        assert!(certify_distinct(&pair, &u, &u).unwrap().is_none());
    }

    #[test]
    fn solution_bound_examples() {
        let pair = example_pair();
        assert_eq!(
            solution_bound(&pair, &word("bab", 2), &word("b^4a^2", 2)).unwrap(),
            Some(3)
        );
        let identity = Word::identity(rank(2));
        assert_eq!(solution_bound(&pair, &identity, &identity).unwrap(), Some(0));

        let trivial_psi = FreeHomomorphism::trivial(rank(2), rank(2));
        let pair = TwistedPair::new(example_pair().phi().clone(), trivial_psi).unwrap();
        assert_eq!(
            solution_bound(&pair, &word("bab", 2), &identity).unwrap(),
            Some(0)
        );
    }

    #[test]
    fn bsl_decides_worked_example() {
        let pair = example_pair();
        let verdict = bsl_decide(&pair, &word("bab", 2), &word("b^4a^2", 2)).unwrap();
        assert_eq!(verdict, Decision::NotConjugate(3));
    }

    #[test]
    fn bsl_finds_constructed_witness() {
        let pair = example_pair();
        let u = word("babaabb", 2);
        let v = Word::identity(rank(2));
        assert_eq!(
            pair.twisted_image(&v, &word("a", 2)).unwrap(),
            u,
            "u must be the twisted image of z = a"
        );
        let verdict = bsl_decide(&pair, &u, &v).unwrap();
        assert_eq!(verdict, Decision::Conjugate(word("a", 2)));
    }

    #[test]
    fn bsl_equal_words_yield_identity_witness() {
        let pair = example_pair();
        let u = word("bab", 2);
        let verdict = bsl_decide(&pair, &u, &u).unwrap();
        assert_eq!(verdict, Decision::Conjugate(Word::identity(rank(2))));
    }

    #[test]
    fn bsl_reports_strict_inequality_failure() {
        let id = FreeHomomorphism::identity(rank(2));
        let pair = TwistedPair::new(id.clone(), id).unwrap();
        assert_eq!(
            bsl_decide(&pair, &word("a", 2), &word("b", 2)).unwrap(),
            Decision::Undecided(UndecidedReason::StrictInequalityFails)
        );
    }

    #[test]
    fn decide_pipeline_on_worked_example() {
        let pair = example_pair();
        assert_eq!(
            decide(&pair, &word("bab", 2), &word("b^4a^2", 2)).unwrap(),
            Decision::NotConjugate(3)
        );
    }

    #[test]
    fn decide_prefers_certificate() {
        let phi = FreeHomomorphism::from_images(vec![word("aab", 2), word("abb", 2)]).unwrap();
        let pair = TwistedPair::new(phi, FreeHomomorphism::identity(rank(2))).unwrap();
        let verdict = decide(&pair, &word("bba", 2), &word("baa", 2)).unwrap();
        assert!(matches!(verdict, Decision::Distinct(_)));
    }

    #[test]
    fn decide_undecided_when_nothing_applies() {
        let id = FreeHomomorphism::identity(rank(2));
        let pair = TwistedPair::new(id.clone(), id).unwrap();
        assert_eq!(
            decide(&pair, &word("a", 2), &word("b", 2)).unwrap(),
            Decision::Undecided(UndecidedReason::NoApplicableMethod)
        );
    }

    #[test]
    fn singly_twisted_worked_example() {
        // ψ = identity gives l = min(5−1, 7−1) = 4 and bound ⌊9/4⌋ = 2.
        // Abelianization rules out any solution: u−v = (−1,−2) but
        // φ_ab(z)−z = (2x+3y, 2x+y) forces 2y = 1.
        let phi =
            FreeHomomorphism::from_images(vec![word("babaa", 2), word("aaBabbb", 2)]).unwrap();
        let verdict = singly_twisted_decide(&phi, &word("bab", 2), &word("b^4a^2", 2)).unwrap();
        assert_eq!(verdict, Decision::NotConjugate(2));

        let u = word("bab", 2);
        assert_eq!(
            singly_twisted_decide(&phi, &u, &u).unwrap(),
            Decision::Conjugate(Word::identity(rank(2)))
        );

        let id = FreeHomomorphism::identity(rank(2));
        assert_eq!(
            singly_twisted_decide(&id, &word("a", 2), &word("b", 2)).unwrap(),
            Decision::Undecided(UndecidedReason::NoApplicableMethod)
        );
    }

    #[test]
    fn membership_examples() {
        let phi =
            FreeHomomorphism::from_images(vec![word("babaa", 2), word("aaBabbb", 2)]).unwrap();
        assert_eq!(membership(&phi, &word("bab", 2)).unwrap(), Decision::NotConjugate(0));
        assert_eq!(
            membership(&phi, &word("babaa", 2)).unwrap(),
            Decision::Conjugate(word("a", 2))
        );
        assert_eq!(
            membership(&phi, &Word::identity(rank(2))).unwrap(),
            Decision::Conjugate(Word::identity(rank(2)))
        );

        let no_remnant =
            FreeHomomorphism::from_images(vec![word("ab", 2), word("b", 2)]).unwrap();
        assert_eq!(
            membership(&no_remnant, &word("a", 2)).unwrap(),
            Decision::Undecided(UndecidedReason::NoRemnant)
        );
    }

    #[test]
    fn injectivity_certificate() {
        let phi =
            FreeHomomorphism::from_images(vec![word("babaa", 2), word("aaBabbb", 2)]).unwrap();
        assert!(certify_injective(&phi));
        // (a↦ab, b↦b) is injective but has no remnant: the certificate is
        // one-sided.
        let injective_without_remnant =
            FreeHomomorphism::from_images(vec![word("ab", 2), word("b", 2)]).unwrap();
        assert!(!certify_injective(&injective_without_remnant));
        assert!(!certify_injective(&FreeHomomorphism::trivial(rank(2), rank(2))));
    }

    #[test]
    fn oracle_examples() {
        let pair = example_pair();
        assert_eq!(
            oracle_decide(&pair, &word("bab", 2), &word("b^4a^2", 2), 3).unwrap(),
            None
        );
        assert_eq!(
            oracle_decide(&pair, &word("bab", 2), &word("b^4a^2", 2), 0).unwrap(),
            None
        );
        let u = word("babaabb", 2);
        let witness = oracle_decide(&pair, &u, &Word::identity(rank(2)), 1)
            .unwrap()
            .expect("witness");
        assert_eq!(pair.twisted_image(&Word::identity(rank(2)), &witness).unwrap(), u);
    }

    #[test]
    fn oracle_enumeration_matches_ball_iterator_order() {
        // The recursive searcher must visit words in the same length-lex
        // order as the ball iterator; probe with a query that matches a
        // specific z only.
        let pair = example_pair();
        for target in enumerate_ball(rank(2), 2) {
            let u = pair.twisted_image(&word("b", 2), &target).unwrap();
            let from_oracle = oracle_decide(&pair, &u, &word("b", 2), 2).unwrap().unwrap();
            let from_scan = enumerate_ball(rank(2), 2)
                .find(|z| pair.twisted_image(&word("b", 2), z).unwrap() == u)
                .unwrap();
            assert_eq!(from_oracle, from_scan);
        }
    }

    fn random_word<R: Rng>(n: usize, max_len: usize, rng: &mut R) -> Word {
        let len = rng.gen_range(0..=max_len);
        let letters: Vec<crate::words::Letter> = (0..len)
            .map(|_| {
                crate::words::Letter::new(
                    rng.gen_range(0..n),
                    if rng.gen() {
                        crate::words::Sign::Plus
                    } else {
                        crate::words::Sign::Minus
                    },
                )
            })
            .collect();
        Word::reduce(rank(n), letters).unwrap()
    }

    #[test]
    fn bsl_matches_oracle_when_precondition_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xB51);
        let mut checked = 0;
        while checked < 60 {
            let phi = crate::hom::sample_hom(rank(2), rank(2), rng.gen_range(4..=8), &mut rng);
            let psi = crate::hom::sample_hom(rank(2), rank(2), 1, &mut rng);
            let pair = TwistedPair::new(phi, psi).unwrap();
            match min_gap(&pair) {
                Some(gap) if gap >= 2 => {}
                _ => continue,
            }
            let u = random_word(2, 3, &mut rng);
            let v = random_word(2, 3, &mut rng);
            let bound = solution_bound(&pair, &u, &v).unwrap().unwrap();
            let verdict = bsl_decide(&pair, &u, &v).unwrap();
            let witness = oracle_decide(&pair, &u, &v, bound).unwrap();
            match (verdict, witness) {
                (Decision::Conjugate(z), Some(w)) => assert_eq!(z, w),
                (Decision::NotConjugate(k), None) => assert_eq!(k, bound),
                (verdict, witness) => panic!("mismatch: {verdict:?} vs {witness:?}"),
            }
            checked += 1;
        }
    }

    #[test]
    fn distinct_and_conjugate_never_coexist() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0E1);
        for _ in 0..200 {
            let phi = crate::hom::sample_hom(rank(2), rank(2), rng.gen_range(2..=6), &mut rng);
            let psi = crate::hom::sample_hom(rank(2), rank(2), 1, &mut rng);
            let pair = TwistedPair::new(phi, psi).unwrap();
            let u = random_word(2, 4, &mut rng);
            let v = random_word(2, 4, &mut rng);
            let certificate = certify_distinct(&pair, &u, &v).unwrap();
            if certificate.is_some() {
                if let Ok(Decision::Conjugate(z)) = bsl_decide(&pair, &u, &v) {
                    panic!("certificate and witness {z} coexist for u={u}, v={v}");
                }
            }
        }
    }
}
