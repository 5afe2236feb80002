//! Free-group homomorphisms as image tuples, their application to words, the
//! free-product extension `φ*u*v`, and the twisted image `φ(z)·v·ψ(z)⁻¹`.

use rand::Rng;

use crate::error::Error;
use crate::words::{Rank, Sign, Word, WordSampler};

/// A homomorphism between free groups, stored combinatorially as the tuple
/// of images of the domain generators. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeHomomorphism {
    domain_rank: Rank,
    codomain_rank: Rank,
    images: Vec<Word>,
}

impl FreeHomomorphism {
    /// Builds a homomorphism from one image word per domain generator. All
    /// images must share a rank, which becomes the codomain rank.
    pub fn from_images(images: Vec<Word>) -> Result<FreeHomomorphism, Error> {
        let first = images.first().ok_or(Error::EmptyTuple)?;
        let codomain_rank = first.rank();
        for image in &images {
            if image.rank() != codomain_rank {
                return Err(Error::RankMismatch {
                    expected: codomain_rank.get(),
                    found: image.rank().get(),
                });
            }
        }
        Ok(FreeHomomorphism {
            domain_rank: Rank::new(images.len())?,
            codomain_rank,
            images,
        })
    }

    /// The identity endomorphism `a_i ↦ a_i`.
    pub fn identity(rank: Rank) -> FreeHomomorphism {
        let images = (0..rank.get())
            .map(|gen| Word::generator(rank, gen, Sign::Plus).unwrap())
            .collect();
        FreeHomomorphism {
            domain_rank: rank,
            codomain_rank: rank,
            images,
        }
    }

    /// The trivial homomorphism `a_i ↦ ε`.
    pub fn trivial(domain_rank: Rank, codomain_rank: Rank) -> FreeHomomorphism {
        FreeHomomorphism {
            domain_rank,
            codomain_rank,
            images: vec![Word::identity(codomain_rank); domain_rank.get()],
        }
    }

    pub fn domain_rank(&self) -> Rank {
        self.domain_rank
    }

    pub fn codomain_rank(&self) -> Rank {
        self.codomain_rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    /// Reduced image of `w` under this homomorphism.
    pub fn apply(&self, w: &Word) -> Result<Word, Error> {
        if w.rank() != self.domain_rank {
            return Err(Error::RankMismatch {
                expected: self.domain_rank.get(),
                found: w.rank().get(),
            });
        }
        let mut acc = Word::identity(self.codomain_rank);
        for letter in w.letters() {
            let image = &self.images[letter.gen()];
            acc = match letter.sign() {
                Sign::Plus => acc.concat(image)?,
                Sign::Minus => acc.concat(&image.inverse())?,
            };
        }
        Ok(acc)
    }

    /// The extension `φ*u*v` on the free product with two extra generators:
    /// the first `n` images are kept verbatim, `b₁ ↦ u`, `b₂ ↦ v`.
    pub fn star_extension(&self, u: &Word, v: &Word) -> Result<FreeHomomorphism, Error> {
        for w in [u, v] {
            if w.rank() != self.codomain_rank {
                return Err(Error::RankMismatch {
                    expected: self.codomain_rank.get(),
                    found: w.rank().get(),
                });
            }
        }
        let mut images = self.images.clone();
        images.push(u.clone());
        images.push(v.clone());
        Ok(FreeHomomorphism {
            domain_rank: Rank::new(self.domain_rank.get() + 2)?,
            codomain_rank: self.codomain_rank,
            images,
        })
    }

    /// Exponent sums of the images of a rank-1-codomain homomorphism, i.e.
    /// the integer tuple that identifies it.
    pub fn exponent_sums(&self) -> Result<Vec<i64>, Error> {
        if self.codomain_rank.get() != 1 {
            return Err(Error::RankMismatch {
                expected: 1,
                found: self.codomain_rank.get(),
            });
        }
        Ok(self.images.iter().map(|w| w.exponent_sum(0)).collect())
    }
}

/// The ordered pair `(φ, ψ)` defining the doubly-twisted conjugacy relation
/// `u ~ v ⟺ ∃z: u = φ(z)·v·ψ(z)⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistedPair {
    phi: FreeHomomorphism,
    psi: FreeHomomorphism,
}

impl TwistedPair {
    pub fn new(phi: FreeHomomorphism, psi: FreeHomomorphism) -> Result<TwistedPair, Error> {
        if phi.domain_rank() != psi.domain_rank() {
            return Err(Error::RankMismatch {
                expected: phi.domain_rank().get(),
                found: psi.domain_rank().get(),
            });
        }
        if phi.codomain_rank() != psi.codomain_rank() {
            return Err(Error::RankMismatch {
                expected: phi.codomain_rank().get(),
                found: psi.codomain_rank().get(),
            });
        }
        Ok(TwistedPair { phi, psi })
    }

    pub fn phi(&self) -> &FreeHomomorphism {
        &self.phi
    }

    pub fn psi(&self) -> &FreeHomomorphism {
        &self.psi
    }

    pub fn domain_rank(&self) -> Rank {
        self.phi.domain_rank()
    }

    pub fn codomain_rank(&self) -> Rank {
        self.phi.codomain_rank()
    }

    /// The reduced word `φ(z)·v·ψ(z)⁻¹`.
    pub fn twisted_image(&self, v: &Word, z: &Word) -> Result<Word, Error> {
        let phi_z = self.phi.apply(z)?;
        let psi_z = self.psi.apply(z)?;
        phi_z.concat(v)?.concat(&psi_z.inverse())
    }
}

/// Draws a homomorphism whose images are independent uniform samples from
/// the codomain ball `H_p`.
pub fn sample_hom<R: Rng + ?Sized>(
    domain_rank: Rank,
    codomain_rank: Rank,
    p: usize,
    rng: &mut R,
) -> FreeHomomorphism {
    let sampler = WordSampler::new(codomain_rank, p);
    sample_hom_with(domain_rank, &sampler, rng)
}

/// As [`sample_hom`], reusing a prebuilt sampler; draws images in generator
/// order from the given stream.
pub fn sample_hom_with<R: Rng + ?Sized>(
    domain_rank: Rank,
    sampler: &WordSampler,
    rng: &mut R,
) -> FreeHomomorphism {
    let images = (0..domain_rank.get()).map(|_| sampler.sample(rng)).collect();
    FreeHomomorphism {
        domain_rank,
        codomain_rank: sampler.rank(),
        images,
    }
}
