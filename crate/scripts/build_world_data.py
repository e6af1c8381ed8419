#!/usr/bin/env python3
"""Regenerate the bundled world data under crates/core/data/world/.

Inputs (fetch the wheels with `pip download --no-deps geonamescache geopandas==0.14.4 pyshp`
and extract them into one directory passed as argv[1]):
  * Natural Earth 1:110m admin-0 countries (public domain), shipped inside geopandas 0.14
  * GeoNames cities with population >= 15000 (CC-BY 4.0), shipped inside geonamescache

Outputs:
  cities.csv      iso2,name,lat,lon,population   (top CITIES_PER_COUNTRY per country)
  borders.geojson FeatureCollection, one feature per country with an "iso2" property
  regions.csv     iso2,region                    (five-region scheme)
"""
import csv
import json
import os
import sys

CITIES_PER_COUNTRY = 30
REGION_OF_CONTINENT = {
    "AF": "Africa",
    "NA": "Americas",
    "SA": "Americas",
    "AS": "Asia",
    "EU": "Europe",
    "OC": "Oceania",
}
# Natural Earth features whose iso_a3 is "-99".
ISO3_OVERRIDES = {"Kosovo": "XKX"}


def rnd(ring):
    return [[round(x, 5), round(y, 5)] for x, y in ring]


def clean_polygon(rings):
    """Rounds coordinates; drops rings with fewer than 3 distinct points."""
    rings = [rnd(r) for r in rings]
    if len({tuple(p) for p in rings[0]}) < 3:
        return None
    return [rings[0]] + [r for r in rings[1:] if len({tuple(p) for p in r}) >= 3]


def main(src, out):
    sys.path.insert(0, src)
    import shapefile

    countries = json.load(open(os.path.join(src, "geonamescache/data/countries.json")))
    iso2_of_iso3 = {c["iso3"]: c["iso"] for c in countries.values()}
    iso2_of_iso3["XKX"] = "XK"

    regioned = set()
    with open(os.path.join(out, "regions.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iso2", "region"])
        for c in sorted(countries.values(), key=lambda c: c["iso"]):
            region = REGION_OF_CONTINENT.get(c["continentcode"])
            if region:
                regioned.add(c["iso"])
                w.writerow([c["iso"], region])

    cities = json.load(open(os.path.join(src, "geonamescache/data/cities15000.json")))
    by_country = {}
    for c in cities.values():
        by_country.setdefault(c["countrycode"], []).append(c)
    with open(os.path.join(out, "cities.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["iso2", "name", "lat", "lon", "population"])
        # Antarctic territories have no region; leave them out.
        for iso2 in sorted(set(by_country) & regioned):
            rows = sorted(by_country[iso2], key=lambda c: (-c["population"], c["name"]))
            for c in rows[:CITIES_PER_COUNTRY]:
                w.writerow([iso2, c["name"], c["latitude"], c["longitude"], c["population"]])

    reader = shapefile.Reader(
        os.path.join(src, "geopandas/datasets/naturalearth_lowres/naturalearth_lowres")
    )
    features = []
    for sr in reader.iterShapeRecords():
        rec = sr.record
        iso3 = ISO3_OVERRIDES.get(rec["name"], rec["iso_a3"])
        iso2 = iso2_of_iso3.get(iso3)
        if iso2 is None:
            print(f"skipping {rec['name']} ({iso3})", file=sys.stderr)
            continue
        geom = sr.shape.__geo_interface__

        polys = [geom["coordinates"]] if geom["type"] == "Polygon" else geom["coordinates"]
        polys = [q for q in (clean_polygon(p) for p in polys) if q]
        if len(polys) == 1:
            geom = {"type": "Polygon", "coordinates": polys[0]}
        else:
            geom = {"type": "MultiPolygon", "coordinates": polys}
        coords = geom["coordinates"]
        features.append(
            {
                "type": "Feature",
                "properties": {"iso2": iso2, "name": rec["name"]},
                "geometry": {"type": geom["type"], "coordinates": coords},
            }
        )
    features.sort(key=lambda f: f["properties"]["iso2"])
    with open(os.path.join(out, "borders.geojson"), "w") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f, separators=(",", ":"))
        f.write("\n")


if __name__ == "__main__":
    here = os.path.dirname(os.path.abspath(__file__))
    main(sys.argv[1], os.path.join(here, "..", "crates", "core", "data", "world"))
