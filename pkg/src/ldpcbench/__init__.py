"""NR-like QC-LDPC codec and telemetry-backed decode microbenchmark."""

from .construction import (
    BaseGraph,
    BgId,
    CodeConfig,
    LdpcCode,
    ParityCheckMatrix,
    expand,
    load_base_graph,
    make_code_config,
    select_base_graph,
    select_lifting_size,
)
from .codec import (
    CnRule,
    Codeword,
    DecodeOutcome,
    DecodeParams,
    LLR_SAT,
    RateMatchedWord,
    cn_update,
    decode_batch,
    encode,
    encode_batch,
    rate_match,
    rate_recover,
)
from .phychain import (
    ChannelConfig,
    LlrBatch,
    awgn,
    build_llr_batch,
    demap_16qam,
    load_llr_batch,
    map_16qam,
    save_llr_batch,
)
from .backends import DecodeBackend, available_backends, get_backend, register_backend
from .bench import BenchRecord, SweepPlan, build_sweep, run_campaign, run_trial
from .telemetry import TelemetrySample, TelemetrySampler, TelemetrySummary, summarize
from .report import (
    paired_speedup,
    service_time_table,
    slot_fraction,
    throughput_vs_batch,
    throughput_vs_iters_dense,
    utilization_histograms,
    write_report,
)

__version__ = "0.1.0"
