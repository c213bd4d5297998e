#!/usr/bin/env python3
"""Generates the OSM fixtures under crates/parkhealth/tests/fixtures/.

The fixture layout is described twice: once as the OSM file this script
writes, and once as plain rectangles checked with shapely. The printed
table of expected areas and per-category counts is the source of the
constants pinned in the integration tests, so the Rust pipeline is tested
against numbers that never went through it.

Run from the repository root:  python3 tools/gen_fixture.py
"""

import math
import os

OUT = os.path.join("crates", "parkhealth", "tests", "fixtures")

# Mean-earth radius used by the pipeline; the planar cross-check projects
# with it too, so areas agree to first order in park size.
R = 6_371_008.8
DEG = math.pi / 180.0

CATS = ["physical", "nature", "environmental", "social", "cultural"]

# tag pair -> category, mirroring the bundled lexicon rows the fixtures use.
LEX = {
    ("leisure", "fitness_station"): "physical",
    ("amenity", "drinking_water"): "physical",
    ("highway", "crossing"): "physical",
    ("leisure", "pitch"): "physical",
    ("sport", "soccer"): "physical",
    ("natural", "tree"): "nature",
    ("amenity", "fountain"): "nature",
    ("natural", "water"): "nature",
    ("water", "pond"): "nature",
    ("natural", "wood"): "nature",
    ("amenity", "recycling"): "environmental",
    ("leisure", "garden"): "environmental",
    ("amenity", "bench"): "social",
    ("leisure", "picnic_table"): "social",
    ("amenity", "cafe"): "social",
    ("building", "pavilion"): "social",
    ("tourism", "artwork"): "cultural",
    ("information", "board"): "cultural",
    ("board_type", "history"): "cultural",
    ("memorial", "bench"): "cultural",
    ("tourism", "museum"): "cultural",
    ("historic", "building"): "cultural",
}
DROPPED_KEYS = {"name", "material", "operator", "source"}
DROPPED_VALUES = {"yes", "no", "unknown", "Bing"}


def categorize(tags):
    kept = [(k, v) for k, v in tags if k not in DROPPED_KEYS and v not in DROPPED_VALUES]
    cats = sorted({LEX[t] for t in kept if t in LEX})
    return {c: 1.0 / len(cats) for c in cats} if cats else {}


class Builder:
    def __init__(self):
        self.nodes = []  # (id, lon, lat, tags)
        self.ways = []  # (id, [node ids], tags)
        self.relations = []  # (id, [(type, ref, role)], tags)
        self.next_anon = 10_000

    def node(self, nid, lon, lat, tags=()):
        self.nodes.append((nid, lon, lat, list(tags)))
        return nid

    def anon(self, lon, lat):
        self.next_anon += 1
        return self.node(self.next_anon, lon, lat)

    def rect_way(self, wid, lon0, lat0, lon1, lat1, tags):
        corners = [(lon0, lat0), (lon1, lat0), (lon1, lat1), (lon0, lat1)]
        refs = [self.anon(lon, lat) for lon, lat in corners]
        self.ways.append((wid, refs + [refs[0]], list(tags)))
        return wid

    def way(self, wid, refs, tags=()):
        self.ways.append((wid, refs, list(tags)))
        return wid

    def relation(self, rid, members, tags):
        self.relations.append((rid, members, list(tags)))
        return rid

    def write(self, path):
        lines = ['<?xml version="1.0" encoding="UTF-8"?>']
        lines.append('<osm version="0.6" generator="gen_fixture.py">')
        for nid, lon, lat, tags in self.nodes:
            attrs = f'id="{nid}" lat="{lat!r}" lon="{lon!r}"'
            if tags:
                lines.append(f"  <node {attrs}>")
                for k, v in tags:
                    lines.append(f'    <tag k="{k}" v="{v}"/>')
                lines.append("  </node>")
            else:
                lines.append(f"  <node {attrs}/>")
        for wid, refs, tags in self.ways:
            lines.append(f'  <way id="{wid}">')
            for ref in refs:
                lines.append(f'    <nd ref="{ref}"/>')
            for k, v in tags:
                lines.append(f'    <tag k="{k}" v="{v}"/>')
            lines.append("  </way>")
        for rid, members, tags in self.relations:
            lines.append(f'  <relation id="{rid}">')
            for mtype, ref, role in members:
                lines.append(f'    <member type="{mtype}" ref="{ref}" role="{role}"/>')
            for k, v in tags:
                lines.append(f'    <tag k="{k}" v="{v}"/>')
            lines.append("  </relation>")
        lines.append("</osm>")
        with open(path, "w") as f:
            f.write("\n".join(lines) + "\n")


def rect_area_ha(lon0, lat0, lon1, lat1):
    """Spherical area of a lon/lat-aligned rectangle, exactly."""
    dlam = abs(lon1 - lon0) * DEG
    area = R * R * dlam * abs(math.sin(lat1 * DEG) - math.sin(lat0 * DEG))
    return area / 1e4


def overlap_ha(a, b):
    lon0 = max(a[0], b[0])
    lat0 = max(a[1], b[1])
    lon1 = min(a[2], b[2])
    lat1 = min(a[3], b[3])
    if lon0 >= lon1 or lat0 >= lat1:
        return 0.0
    return rect_area_ha(lon0, lat0, lon1, lat1)


def inside(rect, lon, lat):
    """Boundary-inclusive point-in-rectangle, like the pipeline."""
    return rect[0] <= lon <= rect[2] and rect[1] <= lat <= rect[3]


def build_mini():
    b = Builder()

    parks = {
        "way/101": ("Stadtpark", (11.000, 48.000, 11.010, 48.006)),
        "way/102": ("Rosenpark", (11.020, 48.000, 11.026, 48.004)),
        "way/103": ("Westpark", (11.030, 48.000, 11.034, 48.0024)),
        "way/105": ("Ahornpark", (11.050, 48.000, 11.0514, 48.0009)),
    }
    for pid, (name, r) in parks.items():
        wid = int(pid.split("/")[1])
        b.rect_way(wid, r[0], r[1], r[2], r[3], [("leisure", "park"), ("name", name)])

    # Inselpark: outer ring split over two ways, plus a hole. The outer
    # rectangle is (11.040, 48.000)-(11.043, 48.002); way 142 runs the top
    # edge reversed so stitching has to flip it.
    outer = (11.040, 48.000, 11.043, 48.002)
    hole = (11.041, 48.0005, 11.042, 48.0015)
    sw = b.anon(11.040, 48.000)
    se = b.anon(11.043, 48.000)
    ne = b.anon(11.043, 48.002)
    nw = b.anon(11.040, 48.002)
    b.way(141, [nw, sw, se, ne])  # west edge down, bottom, east edge up
    b.way(142, [nw, ne])  # top edge, reversed relative to 141
    h = [
        b.anon(hole[0], hole[1]),
        b.anon(hole[2], hole[1]),
        b.anon(hole[2], hole[3]),
        b.anon(hole[0], hole[3]),
    ]
    b.way(143, h + [h[0]])
    b.relation(
        301,
        [("way", 141, "outer"), ("way", 142, ""), ("way", 143, "inner")],
        [("type", "multipolygon"), ("leisure", "park"), ("name", "Inselpark")],
    )
    parks["relation/301"] = ("Inselpark", outer)
    hole_rect = hole

    gardens = {
        "way/201": ("Kräutergarten", (11.002, 48.004, 11.003, 48.005)),
        "way/202": ("Gemeinschaftsgarten", (11.060, 48.000, 11.0605, 48.0004)),
        "way/203": ("Südgarten", (11.062, 48.000, 11.0626, 48.0005)),
        "way/204": ("Obstgarten", (11.064, 48.000, 11.0648, 48.0006)),
    }
    for gid, (name, r) in gardens.items():
        wid = int(gid.split("/")[1])
        b.rect_way(wid, r[0], r[1], r[2], r[3], [("leisure", "garden"), ("name", name)])

    spaces = {
        211: ((10.998, 48.001, 11.002, 48.003), [("natural", "wood")]),
        212: ((11.004, 48.0035, 11.006, 48.0045), [("natural", "water"), ("water", "pond")]),
        213: ((11.022, 48.002, 11.023, 48.0028), [("natural", "water"), ("water", "pond")]),
        214: ((11.007, 48.001, 11.008, 48.0016), [("leisure", "pitch"), ("sport", "soccer"), ("access", "yes")]),
        215: ((11.024, 48.0008, 11.0248, 48.0014), [("leisure", "pitch")]),
        216: ((11.031, 48.0004, 11.0314, 48.0008), [("leisure", "pitch")]),
        217: ((11.009, 48.005, 11.0092, 48.0052), [("amenity", "cafe"), ("building", "yes")]),
        218: ((11.0205, 48.0032, 11.021, 48.0036), [("amenity", "cafe"), ("building", "yes")]),
        219: ((11.0215, 48.0005, 11.022, 48.001), [("tourism", "museum"), ("building", "yes")]),
        220: ((11.032, 48.0012, 11.0324, 48.0016), [("building", "pavilion"), ("historic", "building")]),
    }
    for wid, (r, tags) in spaces.items():
        b.rect_way(wid, r[0], r[1], r[2], r[3], tags)

    def n(nid, lon, lat, *tags):
        b.node(nid, lon, lat, tags)
        return (nid, lon, lat, list(tags))

    elements = [
        # Stadtpark
        n(2001, 11.0010, 48.0005, ("amenity", "bench")),
        n(2002, 11.0015, 48.0007, ("amenity", "bench"), ("material", "wood")),
        n(2003, 11.0030, 48.0010, ("amenity", "bench")),
        n(2004, 11.0050, 48.0012, ("amenity", "bench")),
        n(2005, 11.0065, 48.0030, ("amenity", "bench")),
        n(2006, 11.0085, 48.0042, ("amenity", "bench")),
        n(2007, 11.0045, 48.0008, ("amenity", "bench"), ("memorial", "bench")),
        n(2008, 11.0052, 48.0028, ("leisure", "picnic_table")),
        n(2009, 11.0078, 48.0020, ("leisure", "picnic_table")),
        n(2010, 11.0025, 48.0045, ("natural", "tree")),  # inside Kräutergarten
        n(2011, 11.0035, 48.0032, ("natural", "tree")),
        n(2012, 11.0042, 48.0050, ("natural", "tree")),
        n(2013, 11.0063, 48.0048, ("natural", "tree")),
        n(2014, 11.0071, 48.0037, ("natural", "tree")),
        n(2015, 11.0088, 48.0012, ("natural", "tree")),
        n(2016, 11.0093, 48.0025, ("natural", "tree")),
        n(2017, 11.0014, 48.0052, ("natural", "tree")),
        n(2018, 11.0055, 48.0040, ("amenity", "fountain")),
        n(2019, 11.0022, 48.0018, ("amenity", "recycling")),
        n(2020, 11.0047, 48.0022, ("amenity", "recycling")),
        n(2021, 11.0082, 48.0051, ("amenity", "recycling")),
        n(2022, 11.0037, 48.0041, ("tourism", "artwork")),
        n(2023, 11.0068, 48.0008, ("tourism", "artwork")),
        n(2024, 11.0059, 48.0018, ("information", "board"), ("board_type", "history")),
        n(2025, 11.0031, 48.0024, ("leisure", "fitness_station")),
        n(2026, 11.0033, 48.0026, ("leisure", "fitness_station")),
        n(2027, 11.0035, 48.0024, ("leisure", "fitness_station")),
        n(2028, 11.0037, 48.0026, ("leisure", "fitness_station")),
        n(2029, 11.0041, 48.0013, ("amenity", "drinking_water")),
        n(2030, 11.0089, 48.0033, ("amenity", "drinking_water")),
        n(2031, 11.0061, 48.0026, ("highway", "crossing")),
        # Rosenpark
        n(2040, 11.0210, 48.0005, ("amenity", "bench")),
        n(2041, 11.0222, 48.0012, ("amenity", "bench")),
        n(2042, 11.0243, 48.0021, ("amenity", "bench")),
        n(2043, 11.0254, 48.0033, ("amenity", "bench")),
        n(2044, 11.0231, 48.0037, ("leisure", "picnic_table")),
        n(2045, 11.0203, 48.0016, ("natural", "tree")),
        n(2046, 11.0214, 48.0024, ("natural", "tree")),
        n(2047, 11.0226, 48.0031, ("natural", "tree")),
        n(2048, 11.0238, 48.0006, ("natural", "tree")),
        n(2049, 11.0249, 48.0013, ("natural", "tree")),
        n(2050, 11.0217, 48.0035, ("amenity", "fountain")),
        n(2051, 11.0208, 48.0027, ("amenity", "recycling")),
        n(2052, 11.0246, 48.0028, ("amenity", "recycling")),
        n(2053, 11.0235, 48.0017, ("tourism", "artwork")),
        n(2054, 11.0252, 48.0008, ("information", "board")),
        n(2055, 11.0228, 48.0009, ("leisure", "fitness_station")),
        n(2056, 11.0230, 48.0011, ("leisure", "fitness_station")),
        n(2057, 11.0241, 48.0035, ("amenity", "drinking_water")),
        # Westpark; one bench sits exactly on the southwest corner.
        n(2070, 11.030, 48.000, ("amenity", "bench")),
        n(2071, 11.0325, 48.0019, ("amenity", "bench")),
        n(2072, 11.0305, 48.0012, ("natural", "tree")),
        n(2073, 11.0318, 48.0006, ("natural", "tree")),
        n(2074, 11.0331, 48.0010, ("natural", "tree")),
        n(2075, 11.0312, 48.0019, ("amenity", "recycling")),
        n(2076, 11.0335, 48.0005, ("leisure", "fitness_station")),
        n(2077, 11.0322, 48.0002, ("amenity", "drinking_water")),
        n(2078, 11.0308, 48.0021, ("tourism", "artwork")),
        # Inselpark; one tree is inside the hole and must not count.
        n(2080, 11.0402, 48.0002, ("amenity", "bench")),
        n(2081, 11.0425, 48.0018, ("amenity", "bench")),
        n(2082, 11.0405, 48.0017, ("natural", "tree")),
        n(2083, 11.0428, 48.0003, ("natural", "tree")),
        n(2084, 11.0415, 48.0010, ("natural", "tree")),  # in the hole
        n(2085, 11.0409, 48.0004, ("amenity", "recycling")),
        # Ahornpark
        n(2090, 11.0505, 48.0004, ("amenity", "bench")),
        n(2091, 11.0510, 48.0006, ("natural", "tree")),
        # Outside every park
        n(2095, 11.0700, 48.0000, ("amenity", "bench")),
        n(2096, 10.9990, 48.0005, ("natural", "tree")),
    ]

    # Malformed input: each line exercises one ingest counter.
    b.node(60001, 11.0801, 48.0001)
    b.node(60001, 11.0802, 48.0002)  # duplicate id
    w1 = b.anon(11.082, 48.000)
    w2 = b.anon(11.083, 48.000)
    w3 = b.anon(11.083, 48.001)
    b.way(901, [w1, w2, 99999, w1], [("leisure", "park")])  # unresolved ref
    b.way(902, [w1, w2, w3], [("leisure", "park")])  # open way
    b.way(904, [w1, w2, w1], [("natural", "water")])  # too few vertices
    x1 = b.anon(11.055, 48.000)
    x2 = b.anon(11.056, 48.001)
    x3 = b.anon(11.056, 48.000)
    x4 = b.anon(11.055, 48.001)
    b.way(905, [x1, x2, x3, x4, x1], [("leisure", "park")])  # bowtie
    b.relation(903, [("way", 101, "")], [("type", "route"), ("route", "hiking")])
    b.relation(904, [("way", 9999, "outer")], [("type", "multipolygon"), ("leisure", "park")])

    b.write(os.path.join(OUT, "mini_city.osm"))
    return parks, hole_rect, gardens, spaces, elements


def expected_counts(parks, hole_rect, gardens, spaces, elements, park_tag_values):
    """Recomputes every park's counts from the rectangles alone."""
    areas = {}
    members = dict(parks)
    if "garden" in park_tag_values:
        members.update(gardens)
    table = {}
    for pid, (name, rect) in sorted(members.items()):
        area = rect_area_ha(*rect)
        if pid == "relation/301":
            area -= rect_area_ha(*hole_rect)
        counts = {f"e_{c}": 0.0 for c in CATS}
        counts.update({f"s_{c}": 0.0 for c in CATS})
        for nid, lon, lat, tags in elements:
            if not inside(rect, lon, lat):
                continue
            strictly_in_hole = (
                hole_rect[0] < lon < hole_rect[2] and hole_rect[1] < lat < hole_rect[3]
            )
            if pid == "relation/301" and strictly_in_hole:
                continue
            for cat, w in categorize(tags).items():
                counts[f"e_{cat}"] += w
        space_items = list(spaces.items()) + [
            (int(gid.split("/")[1]), (r, [("leisure", "garden")]))
            for gid, (_, r) in gardens.items()
        ]
        for wid, (rect_s, tags) in space_items:
            if f"way/{wid}" == pid:
                continue  # a park never counts itself
            ov = overlap_ha(rect_s, rect)
            if pid == "relation/301":
                ov -= overlap_ha(rect_s, hole_rect)
            if ov <= 0.0:
                continue
            for cat, w in categorize(tags).items():
                counts[f"s_{cat}"] += w * ov
        table[pid] = (name, area, counts)
        areas[pid] = area
    return table


def shapely_check(parks, hole_rect, gardens, spaces, elements):
    """Independent geometry check of areas and overlaps via shapely."""
    from shapely.geometry import Point as SPoint, box

    lat0 = 48.0
    kx = R * DEG * math.cos(lat0 * DEG)
    ky = R * DEG

    def project(rect):
        return box(rect[0] * kx, rect[1] * ky, rect[2] * kx, rect[3] * ky)

    outer = project(parks["relation/301"][1])
    hole = project(hole_rect)
    insel = outer.difference(hole)
    approx = insel.area / 1e4
    exact = rect_area_ha(*parks["relation/301"][1]) - rect_area_ha(*hole_rect)
    assert abs(approx - exact) / exact < 2e-3, (approx, exact)

    wood = project(spaces[211][0])
    p1 = project(parks["way/101"][1])
    ov = wood.intersection(p1).area / 1e4
    exact_ov = overlap_ha(spaces[211][0], parks["way/101"][1])
    assert abs(ov - exact_ov) / exact_ov < 2e-3, (ov, exact_ov)
    assert not insel.covers(SPoint(11.0415 * kx, 48.0010 * ky))  # tree in hole
    assert project(parks["way/103"][1]).covers(SPoint(11.030 * kx, 48.000 * ky))


def build_grid():
    b = Builder()
    parks = []
    for i in range(16):
        r, c = divmod(i, 4)
        lon0 = 11.2 + 0.01 * c
        lat0 = 48.1 + 0.01 * r
        w = 0.0010 + 0.0002 * (i % 5)
        h = 0.0008 + 0.0002 * (i % 4)
        rect = (lon0, lat0, lon0 + w, lat0 + h)
        tags = [("leisure", "park")]
        if i < 10:
            tags.append(("name", f"Grid Park {i}"))
        b.rect_way(1101 + i, rect[0], rect[1], rect[2], rect[3], tags)
        parks.append(rect)

        lon_c = lon0 + w / 2
        lat_c = lat0 + h / 2
        nid = 30000 + 100 * i

        def put(k, count, tags_):
            for j in range(count):
                b.node(k + j, lon_c + 0.00002 * j, lat_c + 0.00001 * (j % 5), tags_)
            return k + count

        benches = 2 + (i * 3) % 7
        trees = 2 + (i * 5) % 9
        recycling = 1 + i % 3
        fitness = 1 + i % 4
        picnic = i % 2
        nid = put(nid, benches, [("amenity", "bench")])
        nid = put(nid, trees, [("natural", "tree")])
        nid = put(nid, recycling, [("amenity", "recycling")])
        nid = put(nid, fitness, [("leisure", "fitness_station")])
        nid = put(nid, picnic, [("leisure", "picnic_table")])

        if i % 2 == 0:
            b.rect_way(
                1200 + i,
                lon0 + 0.0001,
                lat0 + 0.0001,
                lon0 + 0.0004,
                lat0 + 0.0004,
                [("natural", "water"), ("water", "pond")],
            )
        else:
            b.rect_way(
                1200 + i,
                lon0 + 0.0001,
                lat0 + 0.0001,
                lon0 + 0.0005,
                lat0 + 0.0004,
                [("leisure", "pitch")],
            )
        if i % 3 == 0:
            b.rect_way(
                1300 + i,
                lon0 + 0.0006,
                lat0 + 0.0001,
                lon0 + 0.0009,
                lat0 + 0.0005,
                [("leisure", "garden")],
            )
    b.write(os.path.join(OUT, "mini_grid.osm"))

    rows = ["park_id,total_images,physical,nature,environmental,social,cultural"]
    for i in range(16):
        benches = 2 + (i * 3) % 7
        trees = 2 + (i * 5) % 9
        recycling = 1 + i % 3
        fitness = 1 + i % 4
        images = 240 + 10 * i
        rows.append(
            f"way/{1101 + i},{images},{fitness * 4 + i % 3},{trees * 3 + i % 2},"
            f"{recycling * 2},{benches * 3 + i % 4},{i % 2}"
        )
    with open(os.path.join(OUT, "external_counts.csv"), "w") as f:
        f.write("\n".join(rows) + "\n")

    with open(os.path.join(OUT, "survey.csv"), "w") as f:
        f.write(
            "category,park_name\n"
            "physical,Grid Park 3\n"
            "physical,grid park 7\n"
            "physical,Fantasy Park\n"
            "nature,Grid Park 1\n"
            "nature,Grid Park 5\n"
        )


def write_eval_files():
    gold = [
        ("leisure", "pitch", "physical"),
        ("leisure", "fitness_station", "physical"),
        ("highway", "crossing", "physical"),
        ("natural", "tree", "nature"),
        ("natural", "water", "nature"),
        ("amenity", "fountain", "nature"),
        ("leisure", "garden", "environmental"),
        ("amenity", "recycling", "environmental"),
        ("amenity", "bench", "social"),
        ("amenity", "cafe", "social"),
        ("leisure", "picnic_table", "social"),
        ("tourism", "artwork", "cultural"),
        ("tourism", "museum", "cultural"),
        ("surface", "grass", "none"),
        ("operator", "city", "none"),
    ]
    with open(os.path.join(OUT, "gold.csv"), "w") as f:
        f.write("key,value,category\n")
        for k, v, c in gold:
            f.write(f"{k},{v},{c}\n")

    predictions = [
        ("leisure", "pitch", "physical", 95, "", ""),
        ("leisure", "fitness_station", "physical", 90, "social", 20),
        ("highway", "crossing", "none", 55, "physical", 60),
        ("natural", "tree", "nature", 98, "", ""),
        ("natural", "water", "nature", 85, "environmental", 40),
        ("amenity", "fountain", "environmental", 70, "nature", 65),
        ("leisure", "garden", "environmental", 88, "", ""),
        ("amenity", "recycling", "environmental", 92, "", ""),
        ("amenity", "bench", "social", 97, "", ""),
        ("amenity", "cafe", "social", 93, "", ""),
        ("leisure", "picnic_table", "nature", 45, "social", 80),
        ("tourism", "artwork", "cultural", 91, "", ""),
        ("tourism", "museum", "cultural", 89, "", ""),
        ("surface", "grass", "none", 75, "", ""),
        ("operator", "city", "environmental", 30, "", ""),
    ]
    with open(os.path.join(OUT, "predictions.csv"), "w") as f:
        f.write("key,value,main,main_reliability,secondary,secondary_reliability\n")
        for row in predictions:
            f.write(",".join(str(x) for x in row) + "\n")

    with open(os.path.join(OUT, "label_map.csv"), "w") as f:
        f.write(
            "label,key,value\n"
            "park bench,amenity,bench\n"
            "football pitch,leisure,pitch\n"
            "public artwork,tourism,artwork\n"
            "community garden,leisure,garden\n"
            "drinking fountain,amenity,drinking_water\n"
            "mystery label,foo,bar\n"
        )


def write_config():
    with open(os.path.join(OUT, "mini.toml"), "w") as f:
        f.write(
            """[cities.mini]
extract = "mini_city.osm"
center = [11.0, 48.0]
gold = "gold.csv"
predictions = "predictions.csv"
label_map = "label_map.csv"
population = 1200000
internet_access_pct = 92.5
tagged_fraction = 0.31

[cities.mini_gardens]
extract = "mini_city.osm"
center = [11.0, 48.0]
park_tags = ["leisure=park", "leisure=garden"]

[cities.grid]
extract = "mini_grid.osm"
center = [11.2, 48.1]
external_counts = "external_counts.csv"
survey = "survey.csv"
population = 100000
"""
        )


def main():
    os.makedirs(OUT, exist_ok=True)
    parks, hole_rect, gardens, spaces, elements = build_mini()
    shapely_check(parks, hole_rect, gardens, spaces, elements)
    build_grid()
    write_eval_files()
    write_config()

    for label, tag_values in [("mini", {"park"}), ("mini_gardens", {"park", "garden"})]:
        table = expected_counts(parks, hole_rect, gardens, spaces, elements, tag_values)
        print(f"== {label} ==")
        header = ["park_id", "name", "area_ha"]
        header += [f"e_{c}" for c in CATS] + [f"s_{c}" for c in CATS]
        print(",".join(header))
        for pid, (name, area, counts) in table.items():
            row = [pid, name, f"{area:.6f}"]
            row += [f"{counts[f'e_{c}']:g}" for c in CATS]
            row += [f"{counts[f's_{c}']:.6f}" for c in CATS]
            print(",".join(row))
        print()


if __name__ == "__main__":
    main()
