//! Orientable surface groups of even genus `2k`, as the amalgam
//! `F_2k *_<u> F_2k` with `u = [a1,b1]...[ak,bk]`.

use super::chain::{Chain, Partner};
use super::word::Word;
use super::EmbedError;
use crate::liealg::VectorField;

/// Generator names of the free factor: `A, B` for `k = 1`, otherwise
/// `A1, B1, ..., Ak, Bk`.
pub fn surface_names(k: usize) -> Vec<String> {
    if k == 1 {
        return vec!["A".into(), "B".into()];
    }
    (1..=k)
        .flat_map(|i| [format!("A{i}"), format!("B{i}")])
        .collect()
}

fn product_of_commutators(names: &[String]) -> Word {
    names.chunks(2).fold(Word::empty(), |acc, pair| {
        acc.concat(&Word::commutator(
            &Word::gen(pair[0].clone()),
            &Word::gen(pair[1].clone()),
        ))
    })
}

/// `[a1,b1]...[ak,bk] ([a1',b1']...[ak',bk'])^-1`.
pub fn surface_relator(k: usize) -> Word {
    let names = surface_names(k);
    let primed: Vec<String> = names.iter().map(|n| format!("{n}'")).collect();
    product_of_commutators(&names).concat(&product_of_commutators(&primed).inverse())
}

/// Chain presenting the genus-`2k` surface group: `F_2k` from `2k - 1` free
/// product steps over the one-parameter base `exp(e1)`, then one amalgam
/// over the centralizer of `u = prod [ai, bi]` with all generators as
/// partners.
pub fn surface_group(k: usize, n: usize) -> Result<Chain, EmbedError> {
    if k == 0 {
        return Err(EmbedError::Parse(
            "genus parameter k must be at least 1".into(),
        ));
    }
    let names = surface_names(k);
    let mut chain = Chain::one_param_base(n, &VectorField::basis(n, 1), &names[0])?;
    for name in &names[1..] {
        chain =
            chain.free_product_step(&[Partner::new(name.clone(), Word::gen(names[0].clone()))])?;
    }
    let u = product_of_commutators(&names);
    let partners: Vec<Partner> = names.iter().map(|n| Partner::primed(n)).collect();
    chain = chain.amalgam_step(&partners, &u)?;
    if !chain.eval_word(&surface_relator(k))?.is_identity() {
        return Err(EmbedError::Internal(
            "surface relator is not the identity".into(),
        ));
    }
    Ok(chain)
}

/// [`surface_group`] by genus; odd genus is rejected.
pub fn surface_group_of_genus(genus: usize, n: usize) -> Result<Chain, EmbedError> {
    if genus == 0 || genus % 2 == 1 {
        return Err(EmbedError::OddGenus(genus));
    }
    surface_group(genus / 2, n)
}
