"""
OpenTelemetry tracing for experiments. Disabled unless OTEL_ENABLED; the
tracer is then a no-op and spans cost nothing.
"""

import logging
from typing import Any

from opentelemetry import trace
from opentelemetry.exporter.otlp.proto.http.trace_exporter import OTLPSpanExporter
from opentelemetry.sdk.resources import Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor

from src.config import settings

logger = logging.getLogger("regulus")

_provider: TracerProvider | None = None


def setup_tracing() -> trace.Tracer:
    global _provider
    if not settings.OTEL_ENABLED:
        logger.debug("OpenTelemetry tracing disabled")
        return trace.get_tracer(settings.OTEL_SERVICE_NAME)

    resource = Resource.create(
        {"service.name": settings.OTEL_SERVICE_NAME, "service.version": settings.APP_VERSION}
    )
    provider = TracerProvider(resource=resource)
    try:
        provider.add_span_processor(
            BatchSpanProcessor(OTLPSpanExporter(endpoint=settings.OTEL_EXPORTER_OTLP_ENDPOINT))
        )
        trace.set_tracer_provider(provider)
        _provider = provider
        logger.info(f"OpenTelemetry tracing -> {settings.OTEL_EXPORTER_OTLP_ENDPOINT}")
    except Exception as e:
        logger.error(f"Failed to initialize OpenTelemetry: {e}")
    return trace.get_tracer(settings.OTEL_SERVICE_NAME)


def set_run_attributes(span: trace.Span, **attrs: Any) -> None:
    """Record experiment parameters on a span; None values are skipped."""
    for key, value in attrs.items():
        if value is None:
            continue
        if not isinstance(value, (bool, int, float, str)):
            value = str(value)
        span.set_attribute(f"regulus.{key}", value)


def flush_tracing(timeout_ms: int = 5_000) -> None:
    """Export pending spans; a CLI process exits before the batch timer fires."""
    if _provider is not None:
        _provider.force_flush(timeout_ms)


tracer = setup_tracing()
