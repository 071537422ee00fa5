import io
from datetime import date, datetime, timedelta, timezone

import pytest

from velotrace.ingest import GpsPoint, Trip, assemble_trips

UTC = timezone.utc
T0 = datetime(2017, 5, 1, 8, 0, 0, tzinfo=UTC)  # a Monday


def pt(aid, seconds, lat=None, lon=None, accuracy=5.0, speed=3.0, base=T0):
    return GpsPoint(aid, base + timedelta(seconds=seconds), lat, lon, accuracy, speed)


def make_trip(trip_id="T", start=T0, duration_s=600.0,
              start_point=(44.49, 11.34), end_point=(44.50, 11.35)):
    """Minimal valid Trip for tests that only care about times/endpoints."""
    points = [
        GpsPoint(trip_id, start, start_point[0], start_point[1], 5.0, 3.0),
        GpsPoint(trip_id, start + timedelta(seconds=duration_s), end_point[0], end_point[1], 5.0, 3.0),
    ]
    trips, rej = assemble_trips(points)
    assert len(trips) == 1 and not rej
    return trips[0]


def csv_stream(text: str) -> io.StringIO:
    return io.StringIO(text)


@pytest.fixture
def monday() -> date:
    return date(2017, 5, 1)
