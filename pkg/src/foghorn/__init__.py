"""foghorn: Shipping-Forecast-style marine bulletin tooling.

Gridded forecast preparation, categorical weather scales, the strict
bulletin grammar (render/parse/validate), rules-based text generation,
video-frame corpus building and word-level evaluation.
"""

from .grid import (
    AreaSeries,
    EnsembleField,
    GridField,
    DOMAIN_BBOX,
    SeaArea,
    area_series,
    crop_domain,
    load_area_registry,
    load_grid_bundle,
    mask_sea_area,
    reduce_percentile,
    write_grid_bundle,
)
from .scales import (
    CategoricalScale,
    WeatherCodeMap,
    classify_beaufort,
    classify_douglas,
    classify_visibility,
    classify_weather,
    compass_8,
    load_weather_codes,
    scale_for,
)
from .grammar import (
    Bulletin,
    GaleWarning,
    StateClause,
    Synopsis,
    WeatherClause,
    WindClause,
    parse_bulletin,
    render_bulletin,
    segment_forecast,
    validate,
)
from .generator import (
    consolidate,
    detect_gales,
    generate_area_bulletin,
    generate_synopsis,
    summarize_attribute,
)
from .frames import (
    FrameSet,
    build_corpus,
    encode_attribute_video,
    encode_wind_video,
    rasterize_frame,
    render_pressure_frames,
)
from .evaluate import (
    EvalReport,
    WordScore,
    evaluate_systems,
    micro_average,
    tokenize,
    word_score,
)
from .gateway import (
    GenerationRequest,
    GenerationResponse,
    LocalRulesBackend,
    RemoteBackend,
    batch_generate,
    make_backend,
)

__version__ = "0.1.0"
