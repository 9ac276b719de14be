//! Activation vectors as `arc_id,chi` csv.

use greenroute::net::{Activation, NetError, Network};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActivationCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("arc {0} is listed twice")]
    Duplicate(usize),
    #[error("arc {0} is missing")]
    Missing(usize),
    #[error("arc {0} does not exist")]
    UnknownArc(usize),
    #[error(transparent)]
    Net(#[from] NetError),
}

pub fn write_activation(act: &Activation) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["arc_id", "chi"])
        .expect("writing to memory");
    for (a, c) in act.counts().iter().enumerate() {
        w.write_record([a.to_string(), c.to_string()])
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing memory")).expect("ascii csv")
}

pub fn read_activation(net: &Network, text: &str) -> Result<Activation, ActivationCsvError> {
    let mut counts: Vec<Option<u32>> = vec![None; net.num_arcs()];
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    for rec in r.deserialize::<(usize, u32)>() {
        let (arc, chi) = rec?;
        let slot = counts
            .get_mut(arc)
            .ok_or(ActivationCsvError::UnknownArc(arc))?;
        if slot.replace(chi).is_some() {
            return Err(ActivationCsvError::Duplicate(arc));
        }
    }
    let counts = counts
        .into_iter()
        .enumerate()
        .map(|(a, c)| c.ok_or(ActivationCsvError::Missing(a)))
        .collect::<Result<Vec<u32>, _>>()?;
    Ok(Activation::new(net, counts)?)
}
