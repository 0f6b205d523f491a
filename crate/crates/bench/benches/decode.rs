use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbai_bench::received_words;
use orbai_core::{decoder::candidate_table, BlockModel, Decoder, LinearCode, Modulation};
use std::hint::black_box;

fn candidate_tables(c: &mut Criterion) {
    let code = LinearCode::rlc(128, 116, 1).unwrap();
    let mut group = c.benchmark_group("candidate_table");
    for b in [1usize, 2, 4, 8] {
        let (channel, words) = received_words(&code, 0.5, 3.0, 64, 1);
        let model = BlockModel::new(b, &channel, Modulation::Bpsk).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(b), &b, |bench, _| {
            let mut i = 0;
            bench.iter(|| {
                i = (i + 1) % words.len();
                black_box(candidate_table(&words[i], &model).unwrap())
            })
        });
    }
    group.finish();
}

fn decode_128(c: &mut Criterion) {
    let mut group = c.benchmark_group("decode_rlc_128");
    group.sample_size(20);
    for (k, rho, ebno) in [(110usize, 0.5, 3.7), (116, 0.5, 3.0), (122, 0.75, 3.7)] {
        let code = LinearCode::rlc(128, k, 1).unwrap();
        let (channel, words) = received_words(&code, rho, ebno, 256, 2);
        let decoder = Decoder::new(&code, &channel, 4, 1_000_000).unwrap();
        let id = format!("k{k}_rho{rho}_{ebno}dB");
        group.bench_function(id, |bench| {
            let mut i = 0;
            bench.iter(|| {
                i = (i + 1) % words.len();
                black_box(decoder.decode(&words[i]).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, candidate_tables, decode_128);
criterion_main!(benches);
