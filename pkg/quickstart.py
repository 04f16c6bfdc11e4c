#!/usr/bin/env python3
"""
Quick Start Script for MicroSlice
This script checks your setup and runs the golden corpus once.
"""

import sys
from pathlib import Path


def print_header(text):
    """Print a formatted header"""
    print("\n" + "=" * 60)
    print(f"  {text}")
    print("=" * 60)


def print_step(step, text):
    """Print a step"""
    print(f"\n[{step}] {text}")


def check_python_version():
    """Check if Python version is 3.9+"""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 9):
        print("❌ Python 3.9+ is required")
        print(f"   Current version: {version.major}.{version.minor}.{version.micro}")
        return False
    print(f"✅ Python {version.major}.{version.minor}.{version.micro}")
    return True


def check_packages():
    """Check if required packages are installed"""
    try:
        import dotenv  # noqa: F401
        import jsonschema  # noqa: F401
        import pydantic  # noqa: F401
        import pydantic_settings  # noqa: F401
        print("✅ Required packages installed")
        return True
    except ImportError as e:
        print(f"❌ Missing package: {e.name}")
        print("   Run: pip install -r requirements.txt")
        return False


def check_env_file():
    """The .env file is optional; report which settings it overrides"""
    if not Path(".env").exists():
        print("ℹ️  No .env file, using defaults (MICROSLICE_* variables still apply)")
        return True
    keys = [
        line.split("=", 1)[0].strip()
        for line in Path(".env").read_text(encoding="utf-8").splitlines()
        if line.strip().startswith("MICROSLICE_")
    ]
    print(f"✅ .env found ({', '.join(keys) or 'no MICROSLICE_* keys'})")
    return True


def check_golden_corpus():
    """Every golden document must validate with exit 0"""
    from main import EXIT_OK, run_validate
    from document import load_document
    from errors import SlicingError
    from settings import get_settings

    settings = get_settings()
    paths = sorted(Path(settings.golden_dir).glob("*.json"))
    if not paths:
        print(f"❌ No golden documents in {settings.golden_dir}/")
        return False

    all_passed = True
    for path in paths:
        try:
            result = run_validate(load_document(path), "text", settings)
        except SlicingError as e:
            print(f"❌ {path.name}: {e}")
            all_passed = False
            continue
        if result.exit_code == EXIT_OK:
            print(f"✅ {path.name}")
        else:
            print(f"❌ {path.name}: exit {result.exit_code}")
            all_passed = False
    return all_passed


def main():
    """Main quickstart function"""
    print_header("MicroSlice - Quick Start")

    print("\n🚀 Checking your setup...\n")

    all_good = True

    # Check 1: Python version
    print_step(1, "Checking Python version...")
    if not check_python_version():
        all_good = False

    # Check 2: Python packages
    print_step(2, "Checking Python packages...")
    if not check_packages():
        all_good = False

    # Check 3: Environment file
    print_step(3, "Checking .env configuration...")
    check_env_file()

    # Check 4: Golden corpus
    if all_good:
        print_step(4, "Validating the golden corpus...")
        if not check_golden_corpus():
            all_good = False

    # Summary
    print_header("Setup Status")

    if all_good:
        print("\n🎉 All checks passed! You're ready to go!")
        print("\n📝 Next steps:")
        print("   1. Validate a plan:")
        print("      python main.py validate golden/closed_campus.json")
        print("\n   2. Draw it:")
        print("      python main.py graph golden/mixed_imported_core.json --out plan.dot")
        print("\n   3. Run the tests:")
        print("      pytest")
    else:
        print("\n⚠️  Some checks failed. Please fix the issues above.")
        print("\n📚 Need help? Read README.md")

    print("\n" + "=" * 60 + "\n")
    return 0 if all_good else 1


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\n👋 Goodbye!")
        sys.exit(0)
