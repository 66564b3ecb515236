# conftest.py
# 루트 디렉터리를 sys.path 에 두어 config / models / utils 를 그대로 import 한다.
